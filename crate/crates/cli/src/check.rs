//! Seeded finite-difference and symmetry self-tests of the derivative
//! stack.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stringopt_core::linalg::NewtonConfig;
use stringopt_core::mesh::{SpaceTimeMesh, SpatialMesh};
use stringopt_core::model::{
    constitutive_second_derivative, normal_force, tangent_stiffness, MaterialParams, Trajectory,
};
use stringopt_core::ocp::{assemble_gradient, assemble_jacobian, evaluate_reduced_functional, OcpFields, OcpProblem};
use stringopt_core::statics::{assemble_internal_force, assemble_internal_tangent, build_setpoints};
use stringopt_core::Vec3;

const STEP: f64 = 1e-6;
const FD_TOLERANCE: f64 = 1e-5;
const SYMMETRY_TOLERANCE: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckEntry {
    pub name: &'static str,
    /// Worst error over all sampled states, relative to the derivative scale.
    pub error: f64,
    pub tolerance: f64,
}

impl CheckEntry {
    pub fn passed(&self) -> bool {
        self.error <= self.tolerance
    }
}

#[derive(Debug, Clone, Default)]
pub struct CheckReport {
    pub entries: Vec<CheckEntry>,
}

impl CheckReport {
    pub fn failures(&self) -> usize {
        self.entries.iter().filter(|e| !e.passed()).count()
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            writeln!(
                f,
                "{:<4} {:<40} error {:.3e}  tolerance {:.0e}",
                if e.passed() { "ok" } else { "FAIL" },
                e.name,
                e.error,
                e.tolerance
            )?;
        }
        Ok(())
    }
}

fn random_stretch(rng: &mut ChaCha8Rng, d: usize) -> Vec3 {
    let mut p = [0.0; 3];
    loop {
        for x in p.iter_mut().take(d) {
            *x = rng.gen_range(-2.0..2.0);
        }
        if p.iter().map(|x| x * x).sum::<f64>().sqrt() > 0.3 {
            return p;
        }
    }
}

fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn check_tangent(rng: &mut ChaCha8Rng, params: &MaterialParams, states: usize) -> f64 {
    let d = params.dim;
    let mut worst: f64 = 0.0;
    for _ in 0..states {
        let p = random_stretch(rng, d);
        let t = tangent_stiffness(&p, params).expect("non-degenerate");
        let scale = max_abs(t.iter().flatten().copied());
        for j in 0..d {
            let (mut pp, mut pm) = (p, p);
            pp[j] += STEP;
            pm[j] -= STEP;
            let np = normal_force(&pp, params).expect("non-degenerate");
            let nm = normal_force(&pm, params).expect("non-degenerate");
            for i in 0..d {
                let fd = (np[i] - nm[i]) / (2.0 * STEP);
                worst = worst.max((fd - t[i][j]).abs() / scale);
            }
        }
    }
    worst
}

fn check_third(rng: &mut ChaCha8Rng, params: &MaterialParams, states: usize) -> f64 {
    let d = params.dim;
    let mut worst: f64 = 0.0;
    for _ in 0..states {
        let p = random_stretch(rng, d);
        let dt = constitutive_second_derivative(&p, params).expect("non-degenerate");
        let scale = max_abs(dt.iter().flatten().flatten().copied());
        for k in 0..d {
            let (mut pp, mut pm) = (p, p);
            pp[k] += STEP;
            pm[k] -= STEP;
            let tp = tangent_stiffness(&pp, params).expect("non-degenerate");
            let tm = tangent_stiffness(&pm, params).expect("non-degenerate");
            for i in 0..d {
                for j in 0..d {
                    let fd = (tp[i][j] - tm[i][j]) / (2.0 * STEP);
                    worst = worst.max((fd - dt[i][j][k]).abs() / scale);
                }
            }
        }
    }
    worst
}

fn check_stiffness(rng: &mut ChaCha8Rng, params: &MaterialParams, states: usize) -> f64 {
    let d = params.dim;
    let mesh = SpatialMesh::new(4, params.length).expect("valid mesh");
    let mut worst: f64 = 0.0;
    for _ in 0..states {
        let r: Vec<f64> = (0..mesh.n_nodes() * d)
            .map(|k| {
                let i = (k / d) as f64;
                let vertical = if k % d == d - 1 { -0.4 * i } else { 0.0 };
                vertical + rng.gen_range(-0.1..0.1)
            })
            .collect();
        let tan = assemble_internal_tangent(&mesh, params, &r).expect("non-degenerate");
        let scale = tan.max_abs();
        for j in 0..r.len() {
            let (mut rp, mut rm) = (r.clone(), r.clone());
            rp[j] += STEP;
            rm[j] -= STEP;
            let kp = assemble_internal_force(&mesh, params, &rp).expect("non-degenerate");
            let km = assemble_internal_force(&mesh, params, &rm).expect("non-degenerate");
            for i in 0..r.len() {
                let fd = (kp[i] - km[i]) / (2.0 * STEP);
                worst = worst.max((fd - tan.get(i, j)).abs() / scale);
            }
        }
    }
    worst
}

fn small_problem(params: &MaterialParams) -> OcpProblem {
    let (n_s, n_t) = (3, 4);
    let spatial = SpatialMesh::new(n_s, params.length).expect("valid mesh");
    let direction = [0.5, 0.5, 0.5];
    let draft = Trajectory::new(2.0, direction, [0.0; 3]).expect("positive phase");
    let sp = build_setpoints(&spatial, params, &draft, &NewtonConfig::default()).expect("equilibrium");
    let mut base = [0.0; 3];
    base[..params.dim].copy_from_slice(&sp.r_i[n_s * params.dim..]);
    let traj = Trajectory::new(2.0, direction, base).expect("positive phase");
    let mesh = SpaceTimeMesh::new(n_s, n_t, params.length, 0.0, 6.0).expect("valid mesh");
    OcpProblem::new(mesh, *params, traj, sp, 10.0, 2).expect("valid problem")
}

fn random_fields(rng: &mut ChaCha8Rng, problem: &OcpProblem) -> OcpFields {
    let d = problem.params.dim;
    let mut f = stringopt_core::ocp::initial_guess(problem);
    for x in f.r.iter_mut() {
        *x += rng.gen_range(-0.05..0.05);
    }
    for (k, x) in f.w.iter_mut().enumerate() {
        *x = rng.gen_range(-1.0..1.0) + if k % d == d - 1 { 5.0 } else { 0.0 };
    }
    f
}

/// Worst (jacobian, gradient, symmetry) errors over `states` random fields.
fn check_ocp(rng: &mut ChaCha8Rng, params: &MaterialParams, states: usize) -> (f64, f64, f64) {
    let problem = small_problem(params);
    let (mut jac_err, mut grad_err, mut sym_err): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..states {
        let f = random_fields(rng, &problem);
        let x = f.to_vector();
        let jac = assemble_jacobian(&problem, &f).expect("non-degenerate");
        let g = assemble_gradient(&problem, &f).expect("non-degenerate");
        let jscale = jac.max_abs();
        let gscale = max_abs(g.iter().copied());
        sym_err = sym_err.max(jac.asymmetry() / jscale);
        for k in 0..x.len() {
            let (mut xp, mut xm) = (x.clone(), x.clone());
            xp[k] += STEP;
            xm[k] -= STEP;
            let (fp, fm) = (OcpFields::from_vector(&xp), OcpFields::from_vector(&xm));
            let gp = assemble_gradient(&problem, &fp).expect("non-degenerate");
            let gm = assemble_gradient(&problem, &fm).expect("non-degenerate");
            for i in 0..x.len() {
                let fd = (gp[i] - gm[i]) / (2.0 * STEP);
                jac_err = jac_err.max((fd - jac.get(i, k)).abs() / jscale);
            }
            let lp = evaluate_reduced_functional(&problem, &fp).expect("non-degenerate");
            let lm = evaluate_reduced_functional(&problem, &fm).expect("non-degenerate");
            grad_err = grad_err.max(((lp - lm) / (2.0 * STEP) - g[k]).abs() / gscale);
        }
    }
    (jac_err, grad_err, sym_err)
}

/// Runs every derivative check at `states` random states drawn from `seed`.
pub fn run_checks(params: &MaterialParams, seed: u64, states: usize) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tangent = check_tangent(&mut rng, params, states);
    let third = check_third(&mut rng, params, states);
    let stiffness = check_stiffness(&mut rng, params, states);
    let (jac, grad, sym) = check_ocp(&mut rng, params, states);
    let entry = |name, error, tolerance| CheckEntry { name, error, tolerance };
    CheckReport {
        entries: vec![
            entry("normal force tangent", tangent, FD_TOLERANCE),
            entry("constitutive second derivative", third, FD_TOLERANCE),
            entry("internal force stiffness", stiffness, FD_TOLERANCE),
            entry("optimality system jacobian", jac, FD_TOLERANCE),
            entry("optimality system gradient", grad, FD_TOLERANCE),
            entry("optimality system hessian symmetry", sym, SYMMETRY_TOLERANCE),
        ],
    }
}
