//! Implicit midpoint time stepping of the semi-discrete string
//! `r' = v`, `M v' = -k(r) + b + G u`.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{newton_solve, NewtonConfig, SparseMatrix};
use crate::model::{desired_output, Trajectory};
use crate::ocp::ControlSeries;
use crate::statics::{SemiDiscreteSystem, SetPoints};
use crate::{Error, Result, Vec3};

/// Second order system `M r'' = f(r, u)` with a constant mass matrix.
pub trait Dynamics {
    fn n_dofs(&self) -> usize;
    fn mass(&self) -> &SparseMatrix;
    /// Net nodal force `f(r, u)`.
    fn force(&self, r: &[f64], u: &Vec3) -> Result<Vec<f64>>;
    /// `-df/dr`.
    fn stiffness(&self, r: &[f64]) -> Result<SparseMatrix>;
}

impl Dynamics for SemiDiscreteSystem {
    fn n_dofs(&self) -> usize {
        SemiDiscreteSystem::n_dofs(self)
    }

    fn mass(&self) -> &SparseMatrix {
        &self.mass
    }

    fn force(&self, r: &[f64], u: &Vec3) -> Result<Vec<f64>> {
        let mut f = self.internal_force(r)?;
        for (fi, bi) in f.iter_mut().zip(&self.body) {
            *fi = bi - *fi;
        }
        self.apply_input(u, &mut f);
        Ok(f)
    }

    fn stiffness(&self, r: &[f64]) -> Result<SparseMatrix> {
        self.internal_tangent(r)
    }
}

/// Linear system `M r'' = -K r`, e.g. a string linearized about a rest
/// state. The input is ignored.
#[derive(Debug, Clone)]
pub struct LinearizedSystem {
    pub mass: SparseMatrix,
    pub stiffness: SparseMatrix,
}

impl LinearizedSystem {
    /// `1/2 v^T M v + 1/2 r^T K r`.
    pub fn energy(&self, state: &State) -> Result<f64> {
        let mv = self.mass.mul_vec(&state.v)?;
        let kr = self.stiffness.mul_vec(&state.r)?;
        let kin: f64 = mv.iter().zip(&state.v).map(|(a, b)| a * b).sum();
        let pot: f64 = kr.iter().zip(&state.r).map(|(a, b)| a * b).sum();
        Ok(0.5 * (kin + pot))
    }
}

impl Dynamics for LinearizedSystem {
    fn n_dofs(&self) -> usize {
        self.mass.dim()
    }

    fn mass(&self) -> &SparseMatrix {
        &self.mass
    }

    fn force(&self, r: &[f64], _u: &Vec3) -> Result<Vec<f64>> {
        Ok(self.stiffness.mul_vec(r)?.into_iter().map(|x| -x).collect())
    }

    fn stiffness(&self, _r: &[f64]) -> Result<SparseMatrix> {
        Ok(self.stiffness.clone())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub r: Vec<f64>,
    pub v: Vec<f64>,
}

/// One implicit midpoint step of size `tau` (negative steps integrate
/// backwards).
///
/// The velocity is eliminated through `v+ = 2 (r+ - r) / tau - v`, which
/// leaves `M (2 (r+ - r) / tau - 2 v) = tau f((r+ + r) / 2, u_half)` for the
/// new positions.
pub fn midpoint_step<D: Dynamics>(
    system: &D,
    state: &State,
    u_half: &Vec3,
    tau: f64,
    cfg: &NewtonConfig,
) -> Result<State> {
    if !(tau.is_finite() && tau != 0.0) {
        return Err(Error::InvalidParams("time step must be finite and nonzero"));
    }
    let n = system.n_dofs();
    for len in [state.r.len(), state.v.len()] {
        if len != n {
            return Err(Error::DimensionMismatch { expected: n, got: len });
        }
    }
    let mass = system.mass();
    let midpoint = |r: &[f64]| -> Vec<f64> { r.iter().zip(&state.r).map(|(a, b)| 0.5 * (a + b)).collect() };
    let guess: Vec<f64> = state.r.iter().zip(&state.v).map(|(r, v)| r + tau * v).collect();
    let (r_next, _) = newton_solve(
        |r: &[f64]| {
            let acc: Vec<f64> = r
                .iter()
                .zip(&state.r)
                .zip(&state.v)
                .map(|((a, b), v)| 2.0 * (a - b) / tau - 2.0 * v)
                .collect();
            let mut res = mass.mul_vec(&acc)?;
            let f = system.force(&midpoint(r), u_half)?;
            for (ri, fi) in res.iter_mut().zip(&f) {
                *ri -= tau * fi;
            }
            Ok(res)
        },
        |r: &[f64]| {
            let k = system.stiffness(&midpoint(r))?;
            mass.linear_combination(2.0 / tau, &k, 0.5 * tau)
        },
        guess,
        cfg,
    )?;
    let v_next = r_next
        .iter()
        .zip(&state.r)
        .zip(&state.v)
        .map(|((a, b), v)| 2.0 * (a - b) / tau - v)
        .collect();
    Ok(State { r: r_next, v: v_next })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackingMetrics {
    /// `max_n |y(t_n) - y_d(t_n)|_inf`
    pub max_abs: f64,
    pub max_abs_per_component: Vec3,
    /// Trapezoidal integral of `|y - y_d|^2`.
    pub integral_sq: f64,
    pub integral_sq_per_component: Vec3,
    /// `sqrt(integral_sq / duration)`
    pub rms: f64,
}

/// Deviation of the sampled output from the desired trajectory.
pub fn tracking_error(times: &[f64], outputs: &[Vec3], traj: &Trajectory) -> TrackingMetrics {
    let errs: Vec<Vec3> = times
        .iter()
        .zip(outputs)
        .map(|(&t, y)| {
            let yd = desired_output(t, traj);
            [y[0] - yd[0], y[1] - yd[1], y[2] - yd[2]]
        })
        .collect();
    let mut m = TrackingMetrics {
        max_abs: 0.0,
        max_abs_per_component: [0.0; 3],
        integral_sq: 0.0,
        integral_sq_per_component: [0.0; 3],
        rms: 0.0,
    };
    for e in &errs {
        for c in 0..3 {
            m.max_abs_per_component[c] = m.max_abs_per_component[c].max(e[c].abs());
        }
    }
    m.max_abs = m.max_abs_per_component.iter().fold(0.0, |a, &b| a.max(b));
    for k in 1..errs.len() {
        let dt = times[k] - times[k - 1];
        for c in 0..3 {
            let part = 0.5 * dt * (errs[k - 1][c] * errs[k - 1][c] + errs[k][c] * errs[k][c]);
            m.integral_sq_per_component[c] += part;
        }
    }
    m.integral_sq = m.integral_sq_per_component.iter().sum();
    if times.len() > 1 {
        let duration = times[times.len() - 1] - times[0];
        m.rms = libm::sqrt(m.integral_sq / duration);
    }
    m
}

#[derive(Debug, Clone)]
pub struct SimResult {
    pub times: Vec<f64>,
    pub states: Vec<State>,
    /// Tip position at every time level.
    pub outputs: Vec<Vec3>,
    pub metrics: TrackingMetrics,
}

impl SimResult {
    pub fn final_state(&self) -> &State {
        &self.states[self.states.len() - 1]
    }
}

/// Marches from `[r_i; v_i]` over `[t_start, t_end]` with step `tau`,
/// sampling the control at the step midpoints.
#[allow(clippy::too_many_arguments)]
pub fn run_simulation(
    system: &SemiDiscreteSystem,
    setpoints: &SetPoints,
    control: &ControlSeries,
    tau: f64,
    t_start: f64,
    t_end: f64,
    traj: &Trajectory,
    cfg: &NewtonConfig,
) -> Result<SimResult> {
    if !(tau > 0.0) || !(t_end > t_start) {
        return Err(Error::InvalidParams("time step and interval must be positive"));
    }
    let span = t_end - t_start;
    let steps = libm::round(span / tau);
    if steps < 1.0 || (steps * tau - span).abs() > 1e-9 * span {
        return Err(Error::InvalidParams("time step must divide the interval"));
    }
    let steps = steps as usize;
    let n = system.n_dofs();
    for len in [setpoints.r_i.len(), setpoints.v_i.len()] {
        if len != n {
            return Err(Error::DimensionMismatch { expected: n, got: len });
        }
    }
    let mut states = Vec::with_capacity(steps + 1);
    let mut times = vec![t_start];
    let mut state = State {
        r: setpoints.r_i.clone(),
        v: setpoints.v_i.clone(),
    };
    let mut outputs = vec![system.output(&state.r)];
    for k in 0..steps {
        let t = t_start + k as f64 * tau;
        let next = midpoint_step(system, &state, &control.at(t + 0.5 * tau), tau, cfg)?;
        states.push(core::mem::replace(&mut state, next));
        times.push(t_start + (k + 1) as f64 * tau);
        outputs.push(system.output(&state.r));
    }
    states.push(state);
    let metrics = tracking_error(&times, &outputs, traj);
    Ok(SimResult {
        times,
        states,
        outputs,
        metrics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::SpatialMesh;
    use crate::model::MaterialParams;
    use crate::statics::{build_setpoints, node_value, solve_equilibrium};
    use crate::norm;

    fn tight() -> NewtonConfig {
        NewtonConfig::default().with_tolerance(1e-12)
    }

    fn hanging(n_s: usize) -> (SemiDiscreteSystem, Vec<f64>, Vec3) {
        let params = MaterialParams::default();
        let mesh = SpatialMesh::new(n_s, 1.0).unwrap();
        let r = solve_equilibrium(&mesh, &params, &[0.0; 3], &tight()).unwrap();
        let sys = SemiDiscreteSystem::new(mesh, params).unwrap();
        let u = sys.holding_force(&r).unwrap();
        (sys, r, u)
    }

    fn constant_control(u: Vec3, t0: f64, t1: f64) -> ControlSeries {
        ControlSeries::new(2, vec![t0, t1], vec![u, u]).unwrap()
    }

    #[test]
    fn equilibrium_is_a_fixed_point() {
        let (sys, r, u) = hanging(6);
        let x = State {
            r: r.clone(),
            v: vec![0.0; r.len()],
        };
        let next = midpoint_step(&sys, &x, &u, 0.06, &tight()).unwrap();
        let dr: Vec<f64> = next.r.iter().zip(&r).map(|(a, b)| a - b).collect();
        assert!(norm(&dr) < 1e-12);
        assert!(norm(&next.v) < 1e-10);
    }

    #[test]
    fn linear_energy_is_conserved() {
        let (sys, r, _) = hanging(2);
        let lin = LinearizedSystem {
            mass: sys.mass.clone(),
            stiffness: sys.internal_tangent(&r).unwrap(),
        };
        let n = r.len();
        let mut x = State {
            r: (0..n).map(|k| 0.01 * (k as f64 + 1.0)).collect(),
            v: (0..n).map(|k| 0.02 * (2.0 - k as f64)).collect(),
        };
        let mut e0 = lin.energy(&x).unwrap();
        for _ in 0..50 {
            x = midpoint_step(&lin, &x, &[0.0; 3], 0.1, &NewtonConfig::default().with_tolerance(1e-14)).unwrap();
            let e = lin.energy(&x).unwrap();
            assert!((e - e0).abs() <= 1e-12 * e0.max(1.0), "{e} vs {e0}");
            e0 = e;
        }
    }

    /// Smooth push from rest: `u(t) = u_hold + 0.5 (1 - cos t) (1, 1/2)`.
    fn ramp_run(sys: &SemiDiscreteSystem, r: &[f64], u: Vec3, tau: f64) -> Vec<f64> {
        let t_end = 2.88;
        let times: Vec<f64> = (0..=768).map(|k| k as f64 * 0.00375).collect();
        let values = times
            .iter()
            .map(|&t| {
                let p = 0.5 * (1.0 - libm::cos(t));
                [u[0] + p, u[1] + 0.5 * p, 0.0]
            })
            .collect();
        let control = ControlSeries::new(2, times, values).unwrap();
        let mut x = State {
            r: r.to_vec(),
            v: vec![0.0; r.len()],
        };
        let steps = libm::round(t_end / tau) as usize;
        for k in 0..steps {
            x = midpoint_step(sys, &x, &control.at((k as f64 + 0.5) * tau), tau, &tight()).unwrap();
        }
        x.r
    }

    #[test]
    fn second_order_in_time() {
        let (sys, r, u) = hanging(10);
        let reference = ramp_run(&sys, &r, u, 0.06 / 16.0);
        let errs: Vec<f64> = [0.24, 0.12, 0.06]
            .iter()
            .map(|&tau| {
                let x = ramp_run(&sys, &r, u, tau);
                let d: Vec<f64> = x.iter().zip(&reference).map(|(a, b)| a - b).collect();
                norm(&d)
            })
            .collect();
        for k in 0..2 {
            let rate = libm::log2(errs[k] / errs[k + 1]);
            assert!(rate > 1.7 && rate < 2.3, "rate {rate} from {errs:?}");
        }
    }

    #[test]
    fn reversible() {
        let (sys, r, u) = hanging(4);
        let mut x = State {
            r: r.clone(),
            v: (0..r.len()).map(|k| 0.1 * libm::cos(k as f64)).collect(),
        };
        let start = x.clone();
        let push = [u[0] + 0.3, u[1] - 0.2, 0.0];
        for _ in 0..5 {
            x = midpoint_step(&sys, &x, &push, 0.05, &tight()).unwrap();
        }
        for _ in 0..5 {
            x = midpoint_step(&sys, &x, &push, -0.05, &tight()).unwrap();
        }
        let dr: Vec<f64> = x.r.iter().zip(&start.r).map(|(a, b)| a - b).collect();
        let dv: Vec<f64> = x.v.iter().zip(&start.v).map(|(a, b)| a - b).collect();
        assert!(norm(&dr) < 1e-10 && norm(&dv) < 1e-9);
        assert!(midpoint_step(&sys, &x, &push, 0.0, &tight()).is_err());
    }

    #[test]
    fn weightless_line_stays_put() {
        let params = MaterialParams {
            gravity: 0.0,
            ..MaterialParams::default()
        };
        let mesh = SpatialMesh::new(3, 1.0).unwrap();
        let sys = SemiDiscreteSystem::new(mesh, params).unwrap();
        let line: Vec<f64> = (0..4).flat_map(|i| [i as f64 / 3.0, 0.0]).collect();
        let traj = Trajectory::new(1.0, [0.0; 3], [1.0, 0.0, 0.0]).unwrap();
        let sp = SetPoints {
            r_i: line.clone(),
            r_e: line.clone(),
            v_i: vec![0.0; 8],
            v_e: vec![0.0; 8],
        };
        let res = run_simulation(&sys, &sp, &constant_control([0.0; 3], 0.0, 3.0), 0.1, 0.0, 3.0, &traj, &tight()).unwrap();
        assert_eq!(res.times.len(), 31);
        assert!(res.states.iter().all(|s| s.r == line && s.v.iter().all(|&v| v == 0.0)));
        assert_eq!(res.metrics.max_abs, 0.0);
    }

    #[test]
    fn steady_control_holds_rest_state() {
        let params = MaterialParams::default();
        let mesh = SpatialMesh::new(10, 1.0).unwrap();
        let r = solve_equilibrium(&mesh, &params, &[0.0; 3], &tight()).unwrap();
        let traj = Trajectory::new(2.0, [0.0; 3], node_value(&r, 10, 2)).unwrap();
        let sp = build_setpoints(&mesh, &params, &traj, &tight()).unwrap();
        let sys = SemiDiscreteSystem::new(mesh, params).unwrap();
        let u = sys.holding_force(&sp.r_i).unwrap();
        let res = run_simulation(&sys, &sp, &constant_control(u, 0.0, 6.0), 0.06, 0.0, 6.0, &traj, &tight()).unwrap();
        assert_eq!(res.states.len(), 101);
        let dr: Vec<f64> = res.final_state().r.iter().zip(&sp.r_i).map(|(a, b)| a - b).collect();
        assert!(norm(&dr) < 1e-6);
        assert!(res.metrics.max_abs < 1e-6);
    }

    #[test]
    fn simulation_rejects_bad_steps() {
        let (sys, r, u) = hanging(2);
        let traj = Trajectory::new(1.0, [0.0; 3], [0.0; 3]).unwrap();
        let sp = SetPoints {
            r_i: r.clone(),
            r_e: r.clone(),
            v_i: vec![0.0; r.len()],
            v_e: vec![0.0; r.len()],
        };
        let c = constant_control(u, 0.0, 1.0);
        assert!(run_simulation(&sys, &sp, &c, 0.3, 0.0, 1.0, &traj, &tight()).is_err());
        assert!(run_simulation(&sys, &sp, &c, -0.1, 0.0, 1.0, &traj, &tight()).is_err());
    }

    #[test]
    fn tracking_error_examples() {
        let traj = Trajectory::new(1.0, [1.0, 1.0, 0.0], [0.0, -1.0, 0.0]).unwrap();
        let times: Vec<f64> = (0..=30).map(|k| k as f64 * 0.1).collect();
        let exact: Vec<Vec3> = times.iter().map(|&t| desired_output(t, &traj)).collect();
        let m = tracking_error(&times, &exact, &traj);
        assert_eq!((m.max_abs, m.integral_sq, m.rms), (0.0, 0.0, 0.0));

        let shifted: Vec<Vec3> = exact.iter().map(|y| [y[0] + 0.3, y[1] - 0.4, 0.0]).collect();
        let m = tracking_error(&times, &shifted, &traj);
        assert!((m.integral_sq - 0.25 * 3.0).abs() < 1e-12);
        assert!((m.max_abs - 0.4).abs() < 1e-12);
        assert!((m.max_abs_per_component[0] - 0.3).abs() < 1e-12);
        assert!((m.rms - 0.5).abs() < 1e-12);
    }

    proptest::proptest! {
        #[test]
        fn metrics_nonnegative(offsets in proptest::collection::vec(-5.0f64..5.0, 2..20)) {
            let traj = Trajectory::new(0.5, [1.0, 0.0, 0.0], [0.0; 3]).unwrap();
            let times: Vec<f64> = (0..offsets.len()).map(|k| k as f64 * 0.2).collect();
            let outputs: Vec<Vec3> = offsets.iter().map(|&o| [o, -o, 0.0]).collect();
            let m = tracking_error(&times, &outputs, &traj);
            proptest::prop_assert!(m.max_abs >= 0.0 && m.integral_sq >= 0.0 && m.rms >= 0.0);
        }
    }
}
