//! Structured meshes on the reference interval and on the space-time
//! rectangle `[0, L] x [t_i, t_e]`, bilinear shape functions, Gauss rules
//! and degree-of-freedom numbering.
//!
//! Nodes are numbered lexicographically with `s` running fastest. Element
//! connectivity is counterclockwise starting at the lower-left corner.

use alloc::vec::Vec;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SpatialMesh {
    pub n_s: usize,
    pub length: f64,
}

impl SpatialMesh {
    pub fn new(n_s: usize, length: f64) -> Result<Self> {
        if n_s == 0 {
            return Err(Error::InvalidMesh("n_s must be at least 1"));
        }
        if !(length > 0.0) {
            return Err(Error::InvalidMesh("length must be positive"));
        }
        Ok(SpatialMesh { n_s, length })
    }

    pub fn n_nodes(&self) -> usize {
        self.n_s + 1
    }

    pub fn h(&self) -> f64 {
        self.length / self.n_s as f64
    }

    pub fn node_coord(&self, i: usize) -> f64 {
        if i == self.n_s {
            self.length
        } else {
            i as f64 * self.h()
        }
    }

    pub fn node_coords(&self) -> Vec<f64> {
        (0..self.n_nodes()).map(|i| self.node_coord(i)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeMesh {
    pub n_s: usize,
    pub n_t: usize,
    pub length: f64,
    pub t_start: f64,
    pub t_end: f64,
}

/// Edges of the space-time rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// `s = 0`, where the control acts.
    Control,
    /// `s = L`, the observed tip.
    Output,
    /// `t = t_i`.
    Initial,
    /// `t = t_e`.
    Final,
}

/// Nodes of one boundary edge together with their 1D trace mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryTrace {
    /// Global node indices ordered along the edge.
    pub nodes: Vec<usize>,
    /// Coordinate along the edge (`t` for control/output, `s` otherwise).
    pub coords: Vec<f64>,
    /// Consecutive pairs of positions into `nodes`.
    pub segments: Vec<[usize; 2]>,
}

impl SpaceTimeMesh {
    pub fn new(n_s: usize, n_t: usize, length: f64, t_start: f64, t_end: f64) -> Result<Self> {
        if n_s == 0 || n_t == 0 {
            return Err(Error::InvalidMesh("element counts must be at least 1"));
        }
        if !(length > 0.0) {
            return Err(Error::InvalidMesh("length must be positive"));
        }
        if !(t_end > t_start) {
            return Err(Error::InvalidMesh("t_end must exceed t_start"));
        }
        Ok(SpaceTimeMesh {
            n_s,
            n_t,
            length,
            t_start,
            t_end,
        })
    }

    pub fn spatial(&self) -> SpatialMesh {
        SpatialMesh {
            n_s: self.n_s,
            length: self.length,
        }
    }

    pub fn h_s(&self) -> f64 {
        self.length / self.n_s as f64
    }

    pub fn h_t(&self) -> f64 {
        (self.t_end - self.t_start) / self.n_t as f64
    }

    pub fn n_nodes(&self) -> usize {
        (self.n_s + 1) * (self.n_t + 1)
    }

    pub fn n_elements(&self) -> usize {
        self.n_s * self.n_t
    }

    #[inline]
    pub fn node_index(&self, i: usize, j: usize) -> usize {
        j * (self.n_s + 1) + i
    }

    /// `(i, j)` grid position of a node.
    #[inline]
    pub fn node_grid(&self, node: usize) -> (usize, usize) {
        (node % (self.n_s + 1), node / (self.n_s + 1))
    }

    pub fn time(&self, j: usize) -> f64 {
        if j == self.n_t {
            self.t_end
        } else {
            self.t_start + j as f64 * self.h_t()
        }
    }

    pub fn node_coords(&self, node: usize) -> (f64, f64) {
        let (i, j) = self.node_grid(node);
        (self.spatial().node_coord(i), self.time(j))
    }

    /// Corner nodes of element `e`, counterclockwise from `(s_min, t_min)`.
    pub fn element_nodes(&self, e: usize) -> [usize; 4] {
        let i = e % self.n_s;
        let j = e / self.n_s;
        [
            self.node_index(i, j),
            self.node_index(i + 1, j),
            self.node_index(i + 1, j + 1),
            self.node_index(i, j + 1),
        ]
    }

    /// Lower-left corner `(s, t)` of element `e`.
    pub fn element_origin(&self, e: usize) -> (f64, f64) {
        self.node_coords(self.element_nodes(e)[0])
    }

    pub fn boundary_nodes(&self, which: Boundary) -> BoundaryTrace {
        let (nodes, coords): (Vec<usize>, Vec<f64>) = match which {
            Boundary::Control => (0..=self.n_t).map(|j| (self.node_index(0, j), self.time(j))).unzip(),
            Boundary::Output => (0..=self.n_t)
                .map(|j| (self.node_index(self.n_s, j), self.time(j)))
                .unzip(),
            Boundary::Initial => {
                let sp = self.spatial();
                (0..=self.n_s).map(|i| (self.node_index(i, 0), sp.node_coord(i))).unzip()
            }
            Boundary::Final => {
                let sp = self.spatial();
                (0..=self.n_s)
                    .map(|i| (self.node_index(i, self.n_t), sp.node_coord(i)))
                    .unzip()
            }
        };
        let segments = (0..nodes.len() - 1).map(|k| [k, k + 1]).collect();
        BoundaryTrace {
            nodes,
            coords,
            segments,
        }
    }
}

/// The two vector fields carried on the space-time mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Position,
    Adjoint,
}

/// Global unknown numbering: all position unknowns first, then all adjoint
/// unknowns, each blocked by node and then component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DofMap {
    pub n_nodes: usize,
    pub dim: usize,
}

impl DofMap {
    pub fn new(n_nodes: usize, dim: usize) -> Self {
        DofMap { n_nodes, dim }
    }

    pub fn n_dofs(&self) -> usize {
        2 * self.n_nodes * self.dim
    }

    /// Length of one field block.
    pub fn field_len(&self) -> usize {
        self.n_nodes * self.dim
    }

    #[inline]
    pub fn index(&self, node: usize, field: Field, component: usize) -> usize {
        let offset = match field {
            Field::Position => 0,
            Field::Adjoint => self.field_len(),
        };
        offset + node * self.dim + component
    }
}

/// Gauss rule on `[-1, 1]^2` (volume) or `[-1, 1]` (boundary segments).
/// Boundary points store the coordinate in the first slot.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureKind {
    Volume,
    Boundary,
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` with `order` points.
pub fn gauss_legendre(order: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let (x, w): (&[f64], &[f64]) = match order {
        1 => (&[0.0], &[2.0]),
        2 => (
            &[-0.577_350_269_189_625_8, 0.577_350_269_189_625_8],
            &[1.0, 1.0],
        ),
        3 => (
            &[-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4],
            &[5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0],
        ),
        4 => (
            &[
                -0.861_136_311_594_052_6,
                -0.339_981_043_584_856_3,
                0.339_981_043_584_856_3,
                0.861_136_311_594_052_6,
            ],
            &[
                0.347_854_845_137_453_9,
                0.652_145_154_862_546_1,
                0.652_145_154_862_546_1,
                0.347_854_845_137_453_9,
            ],
        ),
        5 => (
            &[
                -0.906_179_845_938_664,
                -0.538_469_310_105_683,
                0.0,
                0.538_469_310_105_683,
                0.906_179_845_938_664,
            ],
            &[
                0.236_926_885_056_189_1,
                0.478_628_670_499_366_5,
                0.568_888_888_888_888_9,
                0.478_628_670_499_366_5,
                0.236_926_885_056_189_1,
            ],
        ),
        _ => return Err(Error::UnsupportedOrder(order)),
    };
    Ok((x.to_vec(), w.to_vec()))
}

/// Tensor Gauss rule with `order` points per direction.
pub fn quadrature(kind: QuadratureKind, order: usize) -> Result<QuadratureRule> {
    let (x, w) = gauss_legendre(order)?;
    Ok(match kind {
        QuadratureKind::Boundary => QuadratureRule {
            points: x.iter().map(|&xi| [xi, 0.0]).collect(),
            weights: w,
        },
        QuadratureKind::Volume => {
            let mut points = Vec::with_capacity(order * order);
            let mut weights = Vec::with_capacity(order * order);
            for (eta, we) in x.iter().zip(&w) {
                for (xi, wx) in x.iter().zip(&w) {
                    points.push([*xi, *eta]);
                    weights.push(wx * we);
                }
            }
            QuadratureRule { points, weights }
        }
    })
}

/// Bilinear shape functions at a reference point, with gradients mapped to
/// a physical `h_s x h_t` rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeEval {
    pub values: [f64; 4],
    /// `[d/ds, d/dt]` per local node.
    pub grads: [[f64; 2]; 4],
}

const CORNERS: [[f64; 2]; 4] = [[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]];

pub fn shape_functions(local: [f64; 2], h_s: f64, h_t: f64) -> ShapeEval {
    let [xi, eta] = local;
    let mut values = [0.0; 4];
    let mut grads = [[0.0; 2]; 4];
    for (a, c) in CORNERS.iter().enumerate() {
        let fx = 0.5 * (1.0 + c[0] * xi);
        let fy = 0.5 * (1.0 + c[1] * eta);
        values[a] = fx * fy;
        grads[a] = [0.5 * c[0] * fy * 2.0 / h_s, fx * 0.5 * c[1] * 2.0 / h_t];
    }
    ShapeEval { values, grads }
}

/// Linear shape functions on `[-1, 1]`: values of the left and right node.
#[inline]
pub fn line_shape(xi: f64) -> [f64; 2] {
    [0.5 * (1.0 - xi), 0.5 * (1.0 + xi)]
}
