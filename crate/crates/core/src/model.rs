//! Constitutive law of the string and the desired tip trajectory.
//!
//! The string stores the energy density `W(p) = EA (|p|^2 / 2 - |p|)` in
//! terms of the stretch vector `p = d_s r`. Its gradient is the normal force
//! `n = EA (1 - 1/|p|) p`; the tangent stiffness and the third derivative
//! are the exact higher derivatives of `W` and are what the adjoint equation
//! and its Jacobian need.

use crate::{norm, Error, Mat3, Result, Tensor3, Vec3};

/// Stretch magnitudes at or below this value are rejected.
pub const EPS_STRETCH: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialParams {
    /// Mass per reference length `rho * A`.
    pub rho_a: f64,
    /// Axial stiffness `E * A`.
    pub ea: f64,
    pub length: f64,
    pub gravity: f64,
    /// Ambient dimension, 2 or 3.
    pub dim: usize,
}

impl Default for MaterialParams {
    fn default() -> Self {
        MaterialParams {
            rho_a: 1.0,
            ea: 1.0,
            length: 1.0,
            gravity: 9.81,
            dim: 2,
        }
    }
}

impl MaterialParams {
    pub fn new(rho_a: f64, ea: f64, length: f64, gravity: f64, dim: usize) -> Result<Self> {
        let p = MaterialParams {
            rho_a,
            ea,
            length,
            gravity,
            dim,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho_a > 0.0) {
            return Err(Error::InvalidParams("rho_a must be positive"));
        }
        if !(self.ea > 0.0) {
            return Err(Error::InvalidParams("ea must be positive"));
        }
        if !(self.length > 0.0) {
            return Err(Error::InvalidParams("length must be positive"));
        }
        if !(self.gravity >= 0.0) {
            return Err(Error::InvalidParams("gravity must be non-negative"));
        }
        if self.dim != 2 && self.dim != 3 {
            return Err(Error::InvalidParams("dim must be 2 or 3"));
        }
        Ok(())
    }

    /// Speed of longitudinal waves `sqrt(EA / rho_a)`.
    pub fn wave_speed(&self) -> f64 {
        libm::sqrt(self.ea / self.rho_a)
    }
}

/// Finite-time transition of the tip between two rest positions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trajectory {
    /// Length of the pre- and post-actuation phase.
    pub phase: f64,
    pub direction: Vec3,
    /// Output before the motion starts.
    pub base: Vec3,
}

impl Trajectory {
    pub fn new(phase: f64, direction: Vec3, base: Vec3) -> Result<Self> {
        if !(phase > 0.0) {
            return Err(Error::InvalidParams("trajectory phase must be positive"));
        }
        Ok(Trajectory {
            phase,
            direction,
            base,
        })
    }

    /// Same trajectory with the displacement scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut t = *self;
        for d in t.direction.iter_mut() {
            *d *= factor;
        }
        t
    }
}

fn stretch_norm(p: &Vec3) -> Result<f64> {
    let lambda = norm(p);
    if !(lambda > EPS_STRETCH) {
        return Err(Error::DegenerateStretch {
            stretch: lambda,
            element: None,
        });
    }
    Ok(lambda)
}

/// Normal force `EA (1 - |p|^-1) p`.
pub fn normal_force(p: &Vec3, params: &MaterialParams) -> Result<Vec3> {
    let lambda = stretch_norm(p)?;
    let c = params.ea * (1.0 - 1.0 / lambda);
    Ok([c * p[0], c * p[1], c * p[2]])
}

/// Stored energy density whose gradient is [`normal_force`].
pub fn stored_energy(p: &Vec3, params: &MaterialParams) -> Result<f64> {
    let lambda = stretch_norm(p)?;
    Ok(params.ea * (0.5 * lambda * lambda - lambda))
}

/// Derivative of the normal force with respect to the stretch vector.
pub fn tangent_stiffness(p: &Vec3, params: &MaterialParams) -> Result<Mat3> {
    let lambda = stretch_norm(p)?;
    let a = params.ea * (1.0 - 1.0 / lambda);
    let b = params.ea / (lambda * lambda * lambda);
    let mut t = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            t[i][j] = b * (p[i] * p[j]);
        }
        t[i][i] += a;
    }
    Ok(t)
}

/// Derivative of [`tangent_stiffness`]; fully symmetric in its three indices.
pub fn constitutive_second_derivative(p: &Vec3, params: &MaterialParams) -> Result<Tensor3> {
    let lambda = stretch_norm(p)?;
    let l3 = params.ea / (lambda * lambda * lambda);
    let l5 = 3.0 * l3 / (lambda * lambda);
    let delta = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
    let mut d = [[[0.0; 3]; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                d[i][j][k] = l3 * (delta(i, j) * p[k] + delta(i, k) * p[j] + delta(j, k) * p[i])
                    - l5 * p[i] * p[j] * p[k];
            }
        }
    }
    Ok(d)
}

/// Gravity load per reference length, acting along the negative last axis.
pub fn body_force(params: &MaterialParams) -> Vec3 {
    let mut b = [0.0; 3];
    b[params.dim - 1] = -params.rho_a * params.gravity;
    b
}

/// Cubic smoothstep transition: 0 up to `phase`, 1 after `2 * phase`.
pub fn psi(t: f64, traj: &Trajectory) -> f64 {
    let dt = traj.phase;
    if t <= dt {
        0.0
    } else if t <= 2.0 * dt {
        let x = (t - dt) / dt;
        3.0 * x * x - 2.0 * x * x * x
    } else {
        1.0
    }
}

pub fn desired_output(t: f64, traj: &Trajectory) -> Vec3 {
    let s = psi(t, traj);
    [
        traj.base[0] + traj.direction[0] * s,
        traj.base[1] + traj.direction[1] * s,
        traj.base[2] + traj.direction[2] * s,
    ]
}
