//! Space-time finite element discretization of the optimality system of the
//! tracking problem
//!
//! ```text
//! minimize  int_T 1/2 |u|^2 + alpha/2 |r(L, t) - y_d(t)|^2 dt
//! ```
//!
//! subject to the string dynamics with `n(0, t) = -u(t)`, a free lower end
//! and prescribed rest states at `t_i` and `t_e`.
//!
//! Both the position `r` and the multiplier `w` are bilinear on the
//! space-time mesh. The control is eliminated through `u = -w` on the
//! control edge, which turns the stationarity conditions into the gradient
//! of the reduced Lagrangian
//!
//! ```text
//! L(r, w) = -1/2 <w, w>_{s=0} + alpha/2 <r - y_d, r - y_d>_{s=L}
//!           + <d_t w, rho_a d_t r> - <d_s w, n(d_s r)> + <w, b>
//!           + <w, rho_a v_i>_{t=t_i} - <w, rho_a v_e>_{t=t_e}.
//! ```
//!
//! Its gradient with respect to `w` is the weak state equation, the
//! gradient with respect to `r` the weak adjoint equation. The rows tested
//! with position variations on the initial and final time slices are
//! replaced by the Dirichlet data `r = r_i`, `r = r_e`. No velocity unknowns
//! appear anywhere: the rest-state velocities enter only through the time
//! slice integrals.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{newton_solve, NewtonConfig, NewtonReport, SparseMatrix, TripletMatrix};
use crate::mesh::{
    line_shape, quadrature, shape_functions, Boundary, DofMap, Field, QuadratureKind, QuadratureRule, ShapeEval,
    SpaceTimeMesh,
};
use crate::model::{
    body_force, constitutive_second_derivative, desired_output, normal_force, psi, tangent_stiffness,
    MaterialParams, Trajectory,
};
use crate::statics::SetPoints;
use crate::{Error, Result, Vec3};

/// Nodal coefficients of the position and adjoint fields, node-major with
/// `dim` components per node.
#[derive(Debug, Clone, PartialEq)]
pub struct OcpFields {
    pub r: Vec<f64>,
    pub w: Vec<f64>,
}

impl OcpFields {
    pub fn zeros(dofs: &DofMap) -> Self {
        OcpFields {
            r: vec![0.0; dofs.field_len()],
            w: vec![0.0; dofs.field_len()],
        }
    }

    /// Flattens into the global unknown vector (`r` block, then `w`).
    pub fn to_vector(&self) -> Vec<f64> {
        let mut x = Vec::with_capacity(2 * self.r.len());
        x.extend_from_slice(&self.r);
        x.extend_from_slice(&self.w);
        x
    }

    pub fn from_vector(x: &[f64]) -> Self {
        let half = x.len() / 2;
        OcpFields {
            r: x[..half].to_vec(),
            w: x[half..].to_vec(),
        }
    }

    pub fn node_r(&self, node: usize, dim: usize) -> Vec3 {
        crate::statics::node_value(&self.r, node, dim)
    }

    pub fn node_w(&self, node: usize, dim: usize) -> Vec3 {
        crate::statics::node_value(&self.w, node, dim)
    }
}

#[derive(Debug, Clone)]
pub struct OcpProblem {
    pub mesh: SpaceTimeMesh,
    pub params: MaterialParams,
    pub trajectory: Trajectory,
    pub setpoints: SetPoints,
    pub alpha: f64,
    pub volume_rule: QuadratureRule,
    pub boundary_rule: QuadratureRule,
}

impl OcpProblem {
    pub fn new(
        mesh: SpaceTimeMesh,
        params: MaterialParams,
        trajectory: Trajectory,
        setpoints: SetPoints,
        alpha: f64,
        quadrature_order: usize,
    ) -> Result<Self> {
        params.validate()?;
        if !(alpha > 0.0) {
            return Err(Error::InvalidParams("alpha must be positive"));
        }
        if !(trajectory.phase > 0.0) {
            return Err(Error::InvalidParams("trajectory phase must be positive"));
        }
        if (mesh.length - params.length).abs() > 1e-12 * params.length {
            return Err(Error::InvalidMesh("mesh length differs from the material length"));
        }
        let expected = params.dim * (mesh.n_s + 1);
        for v in [&setpoints.r_i, &setpoints.r_e, &setpoints.v_i, &setpoints.v_e] {
            if v.len() != expected {
                return Err(Error::DimensionMismatch {
                    expected,
                    got: v.len(),
                });
            }
        }
        Ok(OcpProblem {
            volume_rule: quadrature(QuadratureKind::Volume, quadrature_order)?,
            boundary_rule: quadrature(QuadratureKind::Boundary, quadrature_order)?,
            mesh,
            params,
            trajectory,
            setpoints,
            alpha,
        })
    }

    pub fn dofs(&self) -> DofMap {
        DofMap::new(self.mesh.n_nodes(), self.params.dim)
    }

    fn check(&self, fields: &OcpFields) -> Result<()> {
        let expected = self.dofs().field_len();
        for v in [&fields.r, &fields.w] {
            if v.len() != expected {
                return Err(Error::DimensionMismatch {
                    expected,
                    got: v.len(),
                });
            }
        }
        Ok(())
    }

    /// Copy of the problem with the tip displacement scaled by `factor`;
    /// the final rest state is moved accordingly.
    pub fn with_scaled_motion(&self, factor: f64) -> OcpProblem {
        let mut p = self.clone();
        p.trajectory = self.trajectory.scaled(factor);
        let sp = &self.setpoints;
        p.setpoints.r_e = sp
            .r_i
            .iter()
            .zip(&sp.r_e)
            .map(|(a, b)| a + factor * (b - a))
            .collect();
        p
    }

    fn shape_table(&self) -> Vec<(ShapeEval, f64)> {
        let (hs, ht) = (self.mesh.h_s(), self.mesh.h_t());
        let jac = 0.25 * hs * ht;
        self.volume_rule
            .points
            .iter()
            .zip(&self.volume_rule.weights)
            .map(|(p, w)| (shape_functions(*p, hs, ht), w * jac))
            .collect()
    }
}

/// Values and first derivatives of both fields at one quadrature point.
struct PointState {
    w: Vec3,
    r_s: Vec3,
    r_t: Vec3,
    w_s: Vec3,
    w_t: Vec3,
}

fn point_state(sh: &ShapeEval, nodes: &[usize; 4], fields: &OcpFields, d: usize) -> PointState {
    let mut st = PointState {
        w: [0.0; 3],
        r_s: [0.0; 3],
        r_t: [0.0; 3],
        w_s: [0.0; 3],
        w_t: [0.0; 3],
    };
    for (a, &node) in nodes.iter().enumerate() {
        let [gs, gt] = sh.grads[a];
        let nv = sh.values[a];
        for c in 0..d {
            let r = fields.r[node * d + c];
            let w = fields.w[node * d + c];
            st.w[c] += nv * w;
            st.r_s[c] += gs * r;
            st.r_t[c] += gt * r;
            st.w_s[c] += gs * w;
            st.w_t[c] += gt * w;
        }
    }
    st
}

fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Piecewise-linear interpolation of a node-major vector on the spatial
/// grid, evaluated on segment `i` at local coordinate `xi`.
fn interp_segment(v: &[f64], i: usize, xi: f64, d: usize) -> Vec3 {
    let [l, r] = line_shape(xi);
    let mut out = [0.0; 3];
    for c in 0..d {
        out[c] = l * v[i * d + c] + r * v[(i + 1) * d + c];
    }
    out
}

/// Gauss points of the edge segments: `(left node, right node, N_left,
/// N_right, coordinate, weight * length / 2)`.
fn edge_points(problem: &OcpProblem, which: Boundary) -> Vec<(usize, usize, f64, f64, f64, f64)> {
    let trace = problem.mesh.boundary_nodes(which);
    let rule = &problem.boundary_rule;
    let mut pts = Vec::with_capacity(trace.segments.len() * rule.weights.len());
    for &[a, b] in &trace.segments {
        let (xa, xb) = (trace.coords[a], trace.coords[b]);
        let half = 0.5 * (xb - xa);
        for (p, w) in rule.points.iter().zip(&rule.weights) {
            let [na, nb] = line_shape(p[0]);
            pts.push((trace.nodes[a], trace.nodes[b], na, nb, xa + half * (1.0 + p[0]), w * half));
        }
    }
    pts
}

/// Reduced Lagrangian `L(r, w)`; its gradient is [`assemble_gradient`].
pub fn evaluate_reduced_functional(problem: &OcpProblem, fields: &OcpFields) -> Result<f64> {
    problem.check(fields)?;
    let d = problem.params.dim;
    let rho_a = problem.params.rho_a;
    let b = body_force(&problem.params);
    let table = problem.shape_table();
    let mut total = 0.0;
    for e in 0..problem.mesh.n_elements() {
        let nodes = problem.mesh.element_nodes(e);
        for (sh, jw) in &table {
            let st = point_state(sh, &nodes, fields, d);
            let n = normal_force(&st.r_s, &problem.params).map_err(|err| err.degenerate_at(e))?;
            total += jw * (rho_a * dot(&st.w_t, &st.r_t) - dot(&st.w_s, &n) + dot(&st.w, &b));
        }
    }
    for (na_node, nb_node, na, nb, _, jw) in edge_points(problem, Boundary::Control) {
        let w = lerp(&fields.w, na_node, nb_node, na, nb, d);
        total -= 0.5 * jw * dot(&w, &w);
    }
    for (na_node, nb_node, na, nb, t, jw) in edge_points(problem, Boundary::Output) {
        let r = lerp(&fields.r, na_node, nb_node, na, nb, d);
        let err = sub(&r, &desired_output(t, &problem.trajectory));
        total += 0.5 * problem.alpha * jw * dot(&err, &err);
    }
    let sp = &problem.setpoints;
    for (which, v, sign) in [(Boundary::Initial, &sp.v_i, 1.0), (Boundary::Final, &sp.v_e, -1.0)] {
        for (k, (na_node, nb_node, na, nb, _, jw)) in edge_points(problem, which).into_iter().enumerate() {
            let seg = k / problem.boundary_rule.weights.len();
            let xi = problem.boundary_rule.points[k % problem.boundary_rule.weights.len()][0];
            let w = lerp(&fields.w, na_node, nb_node, na, nb, d);
            let vel = interp_segment(v, seg, xi, d);
            total += sign * rho_a * jw * dot(&w, &vel);
        }
    }
    Ok(total)
}

fn lerp(v: &[f64], a: usize, b: usize, na: f64, nb: f64, d: usize) -> Vec3 {
    let mut out = [0.0; 3];
    for c in 0..d {
        out[c] = na * v[a * d + c] + nb * v[b * d + c];
    }
    out
}

fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// Gradient of the reduced Lagrangian in the global unknown layout, before
/// any Dirichlet treatment. Entries at adjoint unknowns form the state
/// equation, entries at position unknowns the adjoint equation.
pub fn assemble_gradient(problem: &OcpProblem, fields: &OcpFields) -> Result<Vec<f64>> {
    problem.check(fields)?;
    let dofs = problem.dofs();
    let d = problem.params.dim;
    let rho_a = problem.params.rho_a;
    let b = body_force(&problem.params);
    let table = problem.shape_table();
    let mut g = vec![0.0; dofs.n_dofs()];
    let w_off = dofs.field_len();

    for e in 0..problem.mesh.n_elements() {
        let nodes = problem.mesh.element_nodes(e);
        for (sh, jw) in &table {
            let st = point_state(sh, &nodes, fields, d);
            let n = normal_force(&st.r_s, &problem.params).map_err(|err| err.degenerate_at(e))?;
            let tan = tangent_stiffness(&st.r_s, &problem.params).map_err(|err| err.degenerate_at(e))?;
            let mut tw = [0.0; 3];
            for i in 0..d {
                for j in 0..d {
                    tw[i] += tan[i][j] * st.w_s[j];
                }
            }
            for (a, &node) in nodes.iter().enumerate() {
                let [gs, gt] = sh.grads[a];
                let nv = sh.values[a];
                for c in 0..d {
                    g[w_off + node * d + c] += jw * (rho_a * gt * st.r_t[c] - gs * n[c] + nv * b[c]);
                    g[node * d + c] += jw * (rho_a * gt * st.w_t[c] - gs * tw[c]);
                }
            }
        }
    }

    // control elimination: <dw, u> = -<dw, w> on s = 0
    for (na_node, nb_node, na, nb, _, jw) in edge_points(problem, Boundary::Control) {
        let w = lerp(&fields.w, na_node, nb_node, na, nb, d);
        for c in 0..d {
            g[w_off + na_node * d + c] -= jw * na * w[c];
            g[w_off + nb_node * d + c] -= jw * nb * w[c];
        }
    }
    for (na_node, nb_node, na, nb, t, jw) in edge_points(problem, Boundary::Output) {
        let r = lerp(&fields.r, na_node, nb_node, na, nb, d);
        let err = sub(&r, &desired_output(t, &problem.trajectory));
        for c in 0..d {
            g[na_node * d + c] += problem.alpha * jw * na * err[c];
            g[nb_node * d + c] += problem.alpha * jw * nb * err[c];
        }
    }
    let sp = &problem.setpoints;
    let nq = problem.boundary_rule.weights.len();
    for (which, v, sign) in [(Boundary::Initial, &sp.v_i, 1.0), (Boundary::Final, &sp.v_e, -1.0)] {
        for (k, (na_node, nb_node, na, nb, _, jw)) in edge_points(problem, which).into_iter().enumerate() {
            let vel = interp_segment(v, k / nq, problem.boundary_rule.points[k % nq][0], d);
            for c in 0..d {
                g[w_off + na_node * d + c] += sign * rho_a * jw * na * vel[c];
                g[w_off + nb_node * d + c] += sign * rho_a * jw * nb * vel[c];
            }
        }
    }
    Ok(g)
}

/// Hessian of the reduced Lagrangian, i.e. the exact Jacobian of
/// [`assemble_gradient`]. Symmetric.
pub fn assemble_jacobian(problem: &OcpProblem, fields: &OcpFields) -> Result<SparseMatrix> {
    problem.check(fields)?;
    let dofs = problem.dofs();
    let d = problem.params.dim;
    let rho_a = problem.params.rho_a;
    let table = problem.shape_table();
    let w_off = dofs.field_len();
    let local_n = 8 * d;
    let mut t = TripletMatrix::with_capacity(dofs.n_dofs(), problem.mesh.n_elements() * 3 * 16 * d * d);
    let mut local = vec![0.0; local_n * local_n];
    // local index: field * 4d + a * d + c, field 0 = r, 1 = w
    let li = |field: usize, a: usize, c: usize| field * 4 * d + a * d + c;

    for e in 0..problem.mesh.n_elements() {
        let nodes = problem.mesh.element_nodes(e);
        local.iter_mut().for_each(|v| *v = 0.0);
        for (sh, jw) in &table {
            let st = point_state(sh, &nodes, fields, d);
            let tan = tangent_stiffness(&st.r_s, &problem.params).map_err(|err| err.degenerate_at(e))?;
            let third =
                constitutive_second_derivative(&st.r_s, &problem.params).map_err(|err| err.degenerate_at(e))?;
            let mut dw = [[0.0; 3]; 3];
            for i in 0..d {
                for j in 0..d {
                    for k in 0..d {
                        dw[i][j] += third[i][j][k] * st.w_s[k];
                    }
                }
            }
            for a in 0..4 {
                let [gsa, gta] = sh.grads[a];
                for bn in 0..4 {
                    let [gsb, gtb] = sh.grads[bn];
                    let tt = jw * rho_a * gta * gtb;
                    let ss = jw * gsa * gsb;
                    for i in 0..d {
                        for j in 0..d {
                            let mut coupling = -ss * tan[i][j];
                            if i == j {
                                coupling += tt;
                            }
                            local[li(1, a, i) * local_n + li(0, bn, j)] += coupling;
                            local[li(0, a, i) * local_n + li(1, bn, j)] += coupling;
                            local[li(0, a, i) * local_n + li(0, bn, j)] -= ss * dw[i][j];
                        }
                    }
                }
            }
        }
        let global = |l: usize| {
            let field = l / (4 * d);
            let a = (l % (4 * d)) / d;
            let c = l % d;
            field * w_off + nodes[a] * d + c
        };
        for row in 0..local_n {
            for col in 0..local_n {
                let v = local[row * local_n + col];
                if v != 0.0 {
                    t.push(global(row), global(col), v);
                }
            }
        }
    }

    for (which, off, scale) in [
        (Boundary::Control, w_off, -1.0),
        (Boundary::Output, 0, problem.alpha),
    ] {
        for (na_node, nb_node, na, nb, _, jw) in edge_points(problem, which) {
            for (p, np) in [(na_node, na), (nb_node, nb)] {
                for (q, nq) in [(na_node, na), (nb_node, nb)] {
                    for c in 0..d {
                        t.push(off + p * d + c, off + q * d + c, scale * jw * np * nq);
                    }
                }
            }
        }
    }
    Ok(t.finalize())
}

/// Flags of the position rows on the initial and final time slices.
pub fn dirichlet_rows(problem: &OcpProblem) -> Vec<bool> {
    let dofs = problem.dofs();
    let mut rows = vec![false; dofs.n_dofs()];
    for which in [Boundary::Initial, Boundary::Final] {
        for &node in &problem.mesh.boundary_nodes(which).nodes {
            for c in 0..dofs.dim {
                rows[dofs.index(node, Field::Position, c)] = true;
            }
        }
    }
    rows
}

/// Gradient with the position rows on `t_i` / `t_e` replaced by
/// `r - r_i` / `r - r_e`. This is the nonlinear system that is solved.
pub fn assemble_residual(problem: &OcpProblem, fields: &OcpFields) -> Result<Vec<f64>> {
    let mut g = assemble_gradient(problem, fields)?;
    let d = problem.params.dim;
    let sp = &problem.setpoints;
    for (which, target) in [(Boundary::Initial, &sp.r_i), (Boundary::Final, &sp.r_e)] {
        for (i, &node) in problem.mesh.boundary_nodes(which).nodes.iter().enumerate() {
            for c in 0..d {
                g[node * d + c] = fields.r[node * d + c] - target[i * d + c];
            }
        }
    }
    Ok(g)
}

/// Jacobian of [`assemble_residual`].
pub fn assemble_residual_jacobian(problem: &OcpProblem, fields: &OcpFields) -> Result<SparseMatrix> {
    Ok(assemble_jacobian(problem, fields)?.replace_rows_with_identity(&dirichlet_rows(problem)))
}

/// Rest-to-rest blend `r(t_j) = (1 - psi(t_j)) r_i + psi(t_j) r_e`, `w = 0`.
pub fn initial_guess(problem: &OcpProblem) -> OcpFields {
    let dofs = problem.dofs();
    let d = problem.params.dim;
    let mesh = &problem.mesh;
    let sp = &problem.setpoints;
    let mut fields = OcpFields::zeros(&dofs);
    for j in 0..=mesh.n_t {
        let theta = if j == 0 {
            0.0
        } else if j == mesh.n_t {
            1.0
        } else {
            psi(mesh.time(j), &problem.trajectory)
        };
        for i in 0..=mesh.n_s {
            let node = mesh.node_index(i, j);
            for c in 0..d {
                let k = i * d + c;
                fields.r[node * d + c] = (1.0 - theta) * sp.r_i[k] + theta * sp.r_e[k];
            }
        }
    }
    fields
}

/// Nodal control samples with piecewise-linear reconstruction in time.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlSeries {
    pub dim: usize,
    pub times: Vec<f64>,
    pub values: Vec<Vec3>,
}

impl ControlSeries {
    pub fn new(dim: usize, times: Vec<f64>, values: Vec<Vec3>) -> Result<Self> {
        if times.is_empty() || times.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: times.len().max(1),
                got: values.len(),
            });
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParams("control times must be strictly increasing"));
        }
        Ok(ControlSeries { dim, times, values })
    }

    /// Linear interpolation, held constant outside the sampled interval.
    pub fn at(&self, t: f64) -> Vec3 {
        let n = self.times.len();
        if n == 1 || t <= self.times[0] {
            return self.values[0];
        }
        if t >= self.times[n - 1] {
            return self.values[n - 1];
        }
        let k = self.times.partition_point(|&x| x <= t).saturating_sub(1).min(n - 2);
        let (t0, t1) = (self.times[k], self.times[k + 1]);
        let theta = (t - t0) / (t1 - t0);
        let (a, b) = (self.values[k], self.values[k + 1]);
        [
            a[0] + theta * (b[0] - a[0]),
            a[1] + theta * (b[1] - a[1]),
            a[2] + theta * (b[2] - a[2]),
        ]
    }
}

/// `u(t_j) = -w(0, t_j)` at every time node.
pub fn extract_control(fields: &OcpFields, mesh: &SpaceTimeMesh, dim: usize) -> ControlSeries {
    let trace = mesh.boundary_nodes(Boundary::Control);
    let values = trace
        .nodes
        .iter()
        .map(|&node| {
            let w = fields.node_w(node, dim);
            [-w[0], -w[1], -w[2]]
        })
        .collect();
    ControlSeries {
        dim,
        times: trace.coords,
        values,
    }
}

/// Terms of the tracking cost evaluated on the solved traces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostBreakdown {
    /// `1/2 int |u|^2 dt`
    pub control: f64,
    /// `alpha/2 int |r(L, t) - y_d|^2 dt`
    pub tracking: f64,
    pub total: f64,
}

pub fn cost_breakdown(problem: &OcpProblem, fields: &OcpFields) -> CostBreakdown {
    let d = problem.params.dim;
    let mut control = 0.0;
    for (a, b, na, nb, _, jw) in edge_points(problem, Boundary::Control) {
        let w = lerp(&fields.w, a, b, na, nb, d);
        control += 0.5 * jw * dot(&w, &w);
    }
    let mut tracking = 0.0;
    for (a, b, na, nb, t, jw) in edge_points(problem, Boundary::Output) {
        let r = lerp(&fields.r, a, b, na, nb, d);
        let err = sub(&r, &desired_output(t, &problem.trajectory));
        tracking += 0.5 * problem.alpha * jw * dot(&err, &err);
    }
    CostBreakdown {
        control,
        tracking,
        total: control + tracking,
    }
}

#[derive(Debug, Clone)]
pub struct OcpSolution {
    pub fields: OcpFields,
    pub control: ControlSeries,
    pub cost: CostBreakdown,
    pub report: NewtonReport,
    /// Number of amplitude stages used (1 when plain Newton succeeded).
    pub stages: usize,
}

fn newton_on(problem: &OcpProblem, start: OcpFields, cfg: &NewtonConfig) -> Result<(OcpFields, NewtonReport)> {
    let (x, report) = newton_solve(
        |x: &[f64]| assemble_residual(problem, &OcpFields::from_vector(x)),
        |x: &[f64]| assemble_residual_jacobian(problem, &OcpFields::from_vector(x)),
        start.to_vector(),
        cfg,
    )?;
    Ok((OcpFields::from_vector(&x), report))
}

/// Solves the discrete optimality system by Newton's method from
/// [`initial_guess`]. If that fails, the tip motion is ramped up over
/// `cfg.continuation_steps` stages, each warm-started from the previous.
pub fn solve_ocp(problem: &OcpProblem, cfg: &NewtonConfig) -> Result<OcpSolution> {
    cfg.validate()?;
    let finish = |fields: OcpFields, report: NewtonReport, stages: usize| OcpSolution {
        control: extract_control(&fields, &problem.mesh, problem.params.dim),
        cost: cost_breakdown(problem, &fields),
        fields,
        report,
        stages,
    };
    let direct_err = match newton_on(problem, initial_guess(problem), cfg) {
        Ok((fields, report)) => return Ok(finish(fields, report, 1)),
        Err(e) => e,
    };
    let stages = cfg.continuation_steps;
    if stages < 2 {
        return Err(direct_err);
    }
    let mut report = direct_err.report().cloned().unwrap_or_default();
    let mut fields = initial_guess(&problem.with_scaled_motion(0.0));
    for k in 1..=stages {
        let staged = problem.with_scaled_motion(k as f64 / stages as f64);
        let (next, rep) = newton_on(&staged, fields, cfg)?;
        report.absorb(&rep);
        fields = next;
    }
    Ok(finish(fields, report, stages))
}
