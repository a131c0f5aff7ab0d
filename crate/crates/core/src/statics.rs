//! Semi-discrete string model `M r'' = -k(r) + b + G u`, `y = C r`, on a
//! uniform P1 mesh of the reference interval, and static equilibria.
//!
//! Nodal vectors are laid out node by node: entry `i * dim + c` holds
//! component `c` of node `i`. `G` and `C` pick the first and the last node.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{newton_solve, NewtonConfig, SparseMatrix, TripletMatrix};
use crate::mesh::SpatialMesh;
use crate::model::{body_force, normal_force, tangent_stiffness, MaterialParams, Trajectory};
use crate::{Error, Result, Vec3};

/// Consistent P1 mass matrix scaled by `rho_a`, block diagonal over
/// components.
pub fn assemble_mass(mesh: &SpatialMesh, params: &MaterialParams) -> SparseMatrix {
    let d = params.dim;
    let n = d * mesh.n_nodes();
    let h = mesh.h();
    let diag = params.rho_a * h / 3.0;
    let off = params.rho_a * h / 6.0;
    let mut t = TripletMatrix::with_capacity(n, 4 * d * mesh.n_s);
    for e in 0..mesh.n_s {
        for c in 0..d {
            let (a, b) = (e * d + c, (e + 1) * d + c);
            t.push(a, a, diag);
            t.push(b, b, diag);
            t.push(a, b, off);
            t.push(b, a, off);
        }
    }
    t.finalize()
}

/// Consistent nodal load of the constant body force.
pub fn assemble_body_force(mesh: &SpatialMesh, params: &MaterialParams) -> Vec<f64> {
    let d = params.dim;
    let b = body_force(params);
    let h = mesh.h();
    let mut out = vec![0.0; d * mesh.n_nodes()];
    for e in 0..mesh.n_s {
        for c in 0..d {
            out[e * d + c] += 0.5 * h * b[c];
            out[(e + 1) * d + c] += 0.5 * h * b[c];
        }
    }
    out
}

fn check_len(r: &[f64], mesh: &SpatialMesh, d: usize) -> Result<()> {
    let expected = d * mesh.n_nodes();
    if r.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            got: r.len(),
        });
    }
    Ok(())
}

fn element_stretch(r: &[f64], e: usize, d: usize, h: f64) -> Vec3 {
    let mut p = [0.0; 3];
    for c in 0..d {
        p[c] = (r[(e + 1) * d + c] - r[e * d + c]) / h;
    }
    p
}

/// Internal force `k(r)`, the assembled `<n(d_s r), d_s phi>`.
pub fn assemble_internal_force(mesh: &SpatialMesh, params: &MaterialParams, r: &[f64]) -> Result<Vec<f64>> {
    let d = params.dim;
    check_len(r, mesh, d)?;
    let h = mesh.h();
    let mut k = vec![0.0; r.len()];
    for e in 0..mesh.n_s {
        // d_s r is constant per element, so the element integral is exact.
        let p = element_stretch(r, e, d, h);
        let n = normal_force(&p, params).map_err(|err| err.degenerate_at(e))?;
        for c in 0..d {
            k[e * d + c] -= n[c];
            k[(e + 1) * d + c] += n[c];
        }
    }
    Ok(k)
}

/// Tangent `dk/dr`; symmetric.
pub fn assemble_internal_tangent(mesh: &SpatialMesh, params: &MaterialParams, r: &[f64]) -> Result<SparseMatrix> {
    let d = params.dim;
    check_len(r, mesh, d)?;
    let h = mesh.h();
    let mut t = TripletMatrix::with_capacity(r.len(), 4 * d * d * mesh.n_s);
    for e in 0..mesh.n_s {
        let p = element_stretch(r, e, d, h);
        let tan = tangent_stiffness(&p, params).map_err(|err| err.degenerate_at(e))?;
        for a in 0..2 {
            for b in 0..2 {
                let sign = if a == b { 1.0 } else { -1.0 };
                for i in 0..d {
                    for j in 0..d {
                        t.push((e + a) * d + i, (e + b) * d + j, sign * tan[i][j] / h);
                    }
                }
            }
        }
    }
    Ok(t.finalize())
}

/// Semi-discrete string: constant mass and load plus the nonlinear
/// internal force.
#[derive(Debug, Clone)]
pub struct SemiDiscreteSystem {
    pub mesh: SpatialMesh,
    pub params: MaterialParams,
    pub mass: SparseMatrix,
    pub body: Vec<f64>,
}

impl SemiDiscreteSystem {
    pub fn new(mesh: SpatialMesh, params: MaterialParams) -> Result<Self> {
        params.validate()?;
        if (mesh.length - params.length).abs() > 1e-12 * params.length {
            return Err(Error::InvalidMesh("mesh length differs from the material length"));
        }
        let mass = assemble_mass(&mesh, &params);
        let body = assemble_body_force(&mesh, &params);
        Ok(SemiDiscreteSystem {
            mesh,
            params,
            mass,
            body,
        })
    }

    pub fn dim(&self) -> usize {
        self.params.dim
    }

    pub fn n_dofs(&self) -> usize {
        self.params.dim * self.mesh.n_nodes()
    }

    pub fn internal_force(&self, r: &[f64]) -> Result<Vec<f64>> {
        assemble_internal_force(&self.mesh, &self.params, r)
    }

    pub fn internal_tangent(&self, r: &[f64]) -> Result<SparseMatrix> {
        assemble_internal_tangent(&self.mesh, &self.params, r)
    }

    /// Adds `G u` to a nodal vector.
    pub fn apply_input(&self, u: &Vec3, out: &mut [f64]) {
        for c in 0..self.dim() {
            out[c] += u[c];
        }
    }

    /// Output map `y = C r` (tip position).
    pub fn output(&self, r: &[f64]) -> Vec3 {
        node_value(r, self.mesh.n_s, self.dim())
    }

    /// Force that holds configuration `r` at rest: `G^T (k(r) - b)`.
    pub fn holding_force(&self, r: &[f64]) -> Result<Vec3> {
        let k = self.internal_force(r)?;
        let mut u = [0.0; 3];
        for c in 0..self.dim() {
            u[c] = k[c] - self.body[c];
        }
        Ok(u)
    }
}

/// Value of node `i` of a node-major vector.
pub fn node_value(r: &[f64], i: usize, d: usize) -> Vec3 {
    let mut v = [0.0; 3];
    v[..d].copy_from_slice(&r[i * d..(i + 1) * d]);
    v
}

/// Static equilibrium hanging from `pinned_top` with a free lower end.
///
/// Starts from a vertical line with the mean stretch of the exact hanging
/// solution.
pub fn solve_equilibrium(
    mesh: &SpatialMesh,
    params: &MaterialParams,
    pinned_top: &Vec3,
    cfg: &NewtonConfig,
) -> Result<Vec<f64>> {
    let d = params.dim;
    let stretch = 1.0 + params.rho_a * params.gravity * params.length / (2.0 * params.ea);
    let mut init = vec![0.0; d * mesh.n_nodes()];
    for i in 0..mesh.n_nodes() {
        for c in 0..d {
            init[i * d + c] = pinned_top[c];
        }
        init[i * d + d - 1] -= stretch * mesh.node_coord(i);
    }
    solve_equilibrium_from(mesh, params, pinned_top, init, cfg)
}

/// Static equilibrium from a caller-supplied initial configuration.
pub fn solve_equilibrium_from(
    mesh: &SpatialMesh,
    params: &MaterialParams,
    pinned_top: &Vec3,
    initial: Vec<f64>,
    cfg: &NewtonConfig,
) -> Result<Vec<f64>> {
    params.validate()?;
    let d = params.dim;
    check_len(&initial, mesh, d)?;
    let body = assemble_body_force(mesh, params);
    let mut pinned = vec![false; initial.len()];
    pinned[..d].iter_mut().for_each(|p| *p = true);
    let (r, _) = newton_solve(
        |r: &[f64]| {
            let mut res = assemble_internal_force(mesh, params, r)?;
            for (ri, bi) in res.iter_mut().zip(&body) {
                *ri -= bi;
            }
            for c in 0..d {
                res[c] = r[c] - pinned_top[c];
            }
            Ok(res)
        },
        |r: &[f64]| Ok(assemble_internal_tangent(mesh, params, r)?.replace_rows_with_identity(&pinned)),
        initial,
        cfg,
    )?;
    Ok(r)
}

/// Closed-form hanging string from the origin: vertical, with stretch
/// `1 + rho_a g (L - s) / EA`.
pub fn analytic_hanging(s: f64, params: &MaterialParams) -> Vec3 {
    let k = params.rho_a * params.gravity / params.ea;
    let mut x = [0.0; 3];
    x[params.dim - 1] = -(s + k * (params.length * s - 0.5 * s * s));
    x
}

/// Axial tension of the analytic hanging solution.
pub fn analytic_tension(s: f64, params: &MaterialParams) -> f64 {
    params.rho_a * params.gravity * (params.length - s)
}

/// Initial and final rest configurations of a transition.
#[derive(Debug, Clone, PartialEq)]
pub struct SetPoints {
    pub r_i: Vec<f64>,
    pub r_e: Vec<f64>,
    pub v_i: Vec<f64>,
    pub v_e: Vec<f64>,
}

impl SetPoints {
    pub fn n_dofs(&self) -> usize {
        self.r_i.len()
    }
}

/// Equilibrium hanging from the origin, and the same configuration moved
/// by the trajectory displacement; both at rest.
pub fn build_setpoints(
    mesh: &SpatialMesh,
    params: &MaterialParams,
    traj: &Trajectory,
    cfg: &NewtonConfig,
) -> Result<SetPoints> {
    build_setpoints_at(mesh, params, &[0.0; 3], traj, cfg)
}

/// As [`build_setpoints`], hanging from `anchor` instead of the origin.
pub fn build_setpoints_at(
    mesh: &SpatialMesh,
    params: &MaterialParams,
    anchor: &Vec3,
    traj: &Trajectory,
    cfg: &NewtonConfig,
) -> Result<SetPoints> {
    let d = params.dim;
    let r_i = solve_equilibrium(mesh, params, anchor, cfg)?;
    let r_e = r_i
        .iter()
        .enumerate()
        .map(|(k, x)| x + traj.direction[k % d])
        .collect();
    Ok(SetPoints {
        v_i: vec![0.0; r_i.len()],
        v_e: vec![0.0; r_i.len()],
        r_i,
        r_e,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norm;

    fn table1() -> MaterialParams {
        MaterialParams::default()
    }

    #[test]
    fn mass_single_element() {
        let p = MaterialParams {
            dim: 2,
            ..table1()
        };
        let m = assemble_mass(&SpatialMesh::new(1, 1.0).unwrap(), &p);
        assert!((m.get(0, 0) - 1.0 / 3.0).abs() < 1e-15);
        assert!((m.get(0, 2) - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(m.get(0, 1), 0.0);
        assert!((m.get(3, 3) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn mass_totals_and_symmetry() {
        let p = MaterialParams {
            rho_a: 2.5,
            length: 1.7,
            dim: 3,
            ..table1()
        };
        let mesh = SpatialMesh::new(9, 1.7).unwrap();
        let m = assemble_mass(&mesh, &p);
        for c in 0..3 {
            let total: f64 = m.iter().filter(|(i, _, _)| i % 3 == c).map(|(_, _, v)| v).sum();
            assert!((total - 2.5 * 1.7).abs() < 1e-12);
        }
        assert_eq!(m.asymmetry(), 0.0);
    }

    #[test]
    fn stress_free_and_uniform_stretch() {
        let p = MaterialParams {
            gravity: 0.0,
            ..table1()
        };
        let mesh = SpatialMesh::new(5, 1.0).unwrap();
        let straight: Vec<f64> = (0..6).flat_map(|i| [i as f64 * 0.2, 0.0]).collect();
        let k = assemble_internal_force(&mesh, &p, &straight).unwrap();
        assert!(norm(&k) < 1e-14);
        let doubled: Vec<f64> = straight.iter().map(|x| 2.0 * x).collect();
        let k = assemble_internal_force(&mesh, &p, &doubled).unwrap();
        assert!((k[10] - 1.0).abs() < 1e-12 && k[11].abs() < 1e-14);
        assert!((k[0] + 1.0).abs() < 1e-12);
        assert!(k[2..10].iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn degenerate_element_is_named() {
        let mesh = SpatialMesh::new(3, 1.0).unwrap();
        let r = [0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 2.0, 0.0];
        match assemble_internal_force(&mesh, &table1(), &r) {
            Err(Error::DegenerateStretch { element: Some(1), .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(assemble_internal_tangent(&mesh, &table1(), &r).is_err());
        assert!(assemble_internal_force(&mesh, &table1(), &r[..6]).is_err());
    }

    #[test]
    fn tangent_matches_finite_differences() {
        let p = MaterialParams { ea: 3.0, ..table1() };
        let mesh = SpatialMesh::new(4, 1.0).unwrap();
        let r: Vec<f64> = (0..5)
            .flat_map(|i| {
                let s = i as f64 * 0.25;
                [0.3 * (3.0 * s).sin() + 0.1 * s, -1.2 * s + 0.05 * (7.0 * s).cos()]
            })
            .collect();
        let kt = assemble_internal_tangent(&mesh, &p, &r).unwrap();
        assert!(kt.asymmetry() < 1e-14);
        let h = 1e-6;
        for j in 0..r.len() {
            let mut rp = r.clone();
            let mut rm = r.clone();
            rp[j] += h;
            rm[j] -= h;
            let kp = assemble_internal_force(&mesh, &p, &rp).unwrap();
            let km = assemble_internal_force(&mesh, &p, &rm).unwrap();
            for i in 0..r.len() {
                let fd = (kp[i] - km[i]) / (2.0 * h);
                assert!((fd - kt.get(i, j)).abs() <= 1e-5 * kt.max_abs(), "({i},{j})");
            }
        }
    }

    #[test]
    fn hanging_string_matches_closed_form() {
        let p = table1();
        let mesh = SpatialMesh::new(10, 1.0).unwrap();
        let r = solve_equilibrium(&mesh, &p, &[0.0; 3], &NewtonConfig::default()).unwrap();
        let tip = node_value(&r, 10, 2);
        assert_eq!(tip[0], 0.0);
        let exact = analytic_hanging(1.0, &p);
        assert!((exact[1] + 5.905).abs() < 1e-12);
        assert!((tip[1] - exact[1]).abs() < 0.02 * 5.905);
        // residual of the solved equilibrium
        let sys = SemiDiscreteSystem::new(mesh, p).unwrap();
        let mut res = sys.internal_force(&r).unwrap();
        res.iter_mut().zip(&sys.body).for_each(|(a, b)| *a -= b);
        assert!(norm(&res[2..]) <= 1e-9);
        // whole weight carried at the top
        let u = sys.holding_force(&r).unwrap();
        assert!(u[0].abs() < 1e-9 && (u[1] - 9.81).abs() < 1e-9);
        assert!((analytic_tension(0.0, &p) - 9.81).abs() < 1e-15);
    }

    #[test]
    fn zero_gravity_keeps_straight_line() {
        let p = MaterialParams {
            gravity: 0.0,
            ..table1()
        };
        let mesh = SpatialMesh::new(4, 1.0).unwrap();
        let top = [0.3, -0.2, 0.0];
        let line: Vec<f64> = (0..5).flat_map(|i| [0.3 + i as f64 * 0.25, -0.2]).collect();
        let r = solve_equilibrium_from(&mesh, &p, &top, line.clone(), &NewtonConfig::default()).unwrap();
        assert_eq!(r, line);
        assert_eq!(analytic_hanging(0.4, &p)[1], -0.4);
    }

    #[test]
    fn equilibrium_is_translation_invariant() {
        let p = table1();
        let mesh = SpatialMesh::new(10, 1.0).unwrap();
        let cfg = NewtonConfig::default().with_tolerance(1e-12);
        let r0 = solve_equilibrium(&mesh, &p, &[0.0; 3], &cfg).unwrap();
        let r1 = solve_equilibrium(&mesh, &p, &[1.0, 1.0, 0.0], &cfg).unwrap();
        for (a, b) in r0.iter().zip(&r1) {
            assert!((b - a - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn three_dimensional_hanging() {
        let p = MaterialParams { dim: 3, ..table1() };
        let mesh = SpatialMesh::new(8, 1.0).unwrap();
        let r = solve_equilibrium(&mesh, &p, &[0.0; 3], &NewtonConfig::default()).unwrap();
        let tip = node_value(&r, 8, 3);
        assert!(tip[0].abs() < 1e-12 && tip[1].abs() < 1e-12);
        assert!((tip[2] + 5.905).abs() < 1e-6);
    }

    #[test]
    fn setpoints_are_translated_rest_states() {
        let p = table1();
        let mesh = SpatialMesh::new(10, 1.0).unwrap();
        let traj = Trajectory::new(2.0, [1.0, 1.0, 0.0], [0.0; 3]).unwrap();
        let sp = build_setpoints(&mesh, &p, &traj, &NewtonConfig::default()).unwrap();
        for (a, b) in sp.r_i.iter().zip(&sp.r_e) {
            assert!((b - a - 1.0).abs() < 1e-14);
        }
        assert!(sp.v_i.iter().chain(&sp.v_e).all(|&v| v == 0.0));
        assert_eq!(sp.n_dofs(), 22);

        let moved = build_setpoints_at(&mesh, &p, &[1.0, 1.0, 0.0], &traj, &NewtonConfig::default()).unwrap();
        for (a, b) in sp.r_i.iter().zip(&moved.r_i) {
            assert!((b - a - 1.0).abs() < 1e-12);
        }
    }
}
