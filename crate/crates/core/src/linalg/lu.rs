//! Sparse direct solver: reverse Cuthill-McKee reordering followed by a
//! banded LU factorization with partial (row) pivoting.
//!
//! The structured space-time systems have a narrow band once the unknowns
//! are reordered, so the band factorization costs `O(n * kl * (kl + ku))`.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use super::{norm2, SparseMatrix};
use crate::{Error, Result};

/// Reverse Cuthill-McKee ordering of the symmetrized sparsity pattern.
/// Returns `perm` with `perm[new] = old`.
fn rcm_ordering(a: &SparseMatrix) -> Vec<usize> {
    let n = a.dim();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, j, _) in a.iter() {
        if i != j {
            adj[i].push(j);
            adj[j].push(i);
        }
    }
    for list in adj.iter_mut() {
        list.sort_unstable();
        list.dedup();
    }
    let degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    for list in adj.iter_mut() {
        list.sort_by_key(|&k| (degree[k], k));
    }

    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::new();
    // Start each component from a pseudo-peripheral vertex: the lowest
    // degree unvisited node, refined by repeated BFS to the far end.
    while let Some(seed) = (0..n).filter(|&k| !visited[k]).min_by_key(|&k| (degree[k], k)) {
        let start = pseudo_peripheral(seed, &adj, &visited, &degree);
        visited[start] = true;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &u in &adj[v] {
                if !visited[u] {
                    visited[u] = true;
                    queue.push_back(u);
                }
            }
        }
    }
    order.reverse();
    order
}

fn pseudo_peripheral(seed: usize, adj: &[Vec<usize>], visited: &[bool], degree: &[usize]) -> usize {
    let mut current = seed;
    let mut best_ecc = 0;
    for _ in 0..8 {
        let (far, ecc) = bfs_farthest(current, adj, visited, degree);
        if ecc <= best_ecc {
            break;
        }
        best_ecc = ecc;
        current = far;
    }
    current
}

fn bfs_farthest(start: usize, adj: &[Vec<usize>], visited: &[bool], degree: &[usize]) -> (usize, usize) {
    let mut level = vec![usize::MAX; adj.len()];
    level[start] = 0;
    let mut queue = VecDeque::from([start]);
    let mut last = start;
    while let Some(v) = queue.pop_front() {
        let lv = level[v];
        if lv > level[last] || (lv == level[last] && degree[v] < degree[last]) {
            last = v;
        }
        for &u in &adj[v] {
            if !visited[u] && level[u] == usize::MAX {
                level[u] = lv + 1;
                queue.push_back(u);
            }
        }
    }
    (last, level[last])
}

/// LU factors of a permuted sparse matrix held in band storage.
#[derive(Debug, Clone)]
pub struct SparseLu {
    n: usize,
    /// `perm[new] = old`
    perm: Vec<usize>,
    kl: usize,
    /// Row width in band storage: `2 * kl + ku + 1`.
    width: usize,
    band: Vec<f64>,
    pivots: Vec<usize>,
}

impl SparseLu {
    pub fn factor(a: &SparseMatrix) -> Result<SparseLu> {
        let n = a.dim();
        let perm = rcm_ordering(a);
        let mut inv = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let (mut kl, mut ku) = (0, 0);
        for (i, j, _) in a.iter() {
            let (pi, pj) = (inv[i], inv[j]);
            if pi > pj {
                kl = kl.max(pi - pj);
            } else {
                ku = ku.max(pj - pi);
            }
        }
        let width = 2 * kl + ku + 1;
        let mut band = vec![0.0; n * width];
        // Row i stores columns i - kl ..= i + kl + ku.
        for (i, j, v) in a.iter() {
            let (pi, pj) = (inv[i], inv[j]);
            band[pi * width + pj + kl - pi] += v;
        }
        let scale = a.max_abs();
        let mut lu = SparseLu {
            n,
            perm,
            kl,
            width,
            band,
            pivots: vec![0; n],
        };
        lu.eliminate(ku, scale)?;
        Ok(lu)
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> usize {
        i * self.width + j + self.kl - i
    }

    fn eliminate(&mut self, ku: usize, scale: f64) -> Result<()> {
        let n = self.n;
        let kl = self.kl;
        let tiny = scale * 1e-14;
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let last_col = (k + kl + ku).min(n - 1);
            let mut p = k;
            let mut best = libm::fabs(self.band[self.at(k, k)]);
            for i in k + 1..=last_row {
                let v = libm::fabs(self.band[self.at(i, k)]);
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if !(best > tiny) {
                return Err(Error::SingularMatrix {
                    column: self.perm[k],
                });
            }
            self.pivots[k] = p;
            if p != k {
                for j in k..=last_col {
                    let (a, b) = (self.at(k, j), self.at(p, j));
                    self.band.swap(a, b);
                }
            }
            let pivot = self.band[self.at(k, k)];
            for i in k + 1..=last_row {
                let ik = self.at(i, k);
                let l = self.band[ik] / pivot;
                self.band[ik] = l;
                if l == 0.0 {
                    continue;
                }
                let (row_k, row_i) = (k * self.width, i * self.width);
                for j in k + 1..=last_col {
                    let u = self.band[row_k + j + kl - k];
                    self.band[row_i + j + kl - i] -= l * u;
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Lower and upper bandwidth of the factored (reordered) matrix.
    pub fn bandwidth(&self) -> (usize, usize) {
        (self.kl, self.width - 1 - 2 * self.kl)
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        if rhs.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: rhs.len(),
            });
        }
        let upper = self.width - 1 - self.kl;
        let mut b: Vec<f64> = self.perm.iter().map(|&old| rhs[old]).collect();
        for k in 0..n {
            b.swap(k, self.pivots[k]);
            let bk = b[k];
            if bk != 0.0 {
                for i in k + 1..=(k + self.kl).min(n - 1) {
                    b[i] -= self.band[self.at(i, k)] * bk;
                }
            }
        }
        for k in (0..n).rev() {
            let mut acc = b[k];
            for j in k + 1..=(k + upper).min(n - 1) {
                acc -= self.band[self.at(k, j)] * b[j];
            }
            b[k] = acc / self.band[self.at(k, k)];
        }
        let mut x = vec![0.0; n];
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = b[new];
        }
        Ok(x)
    }
}

/// Solves `A x = rhs` by sparse LU with one step of iterative refinement.
pub fn solve_linear(a: &SparseMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    if rhs.len() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: rhs.len(),
        });
    }
    let lu = SparseLu::factor(a)?;
    let mut x = lu.solve(rhs)?;
    let ax = a.mul_vec(&x)?;
    let r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, v)| b - v).collect();
    if norm2(&r) > 0.0 {
        let dx = lu.solve(&r)?;
        for (xi, d) in x.iter_mut().zip(dx) {
            *xi += d;
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::super::TripletMatrix;
    use super::*;
    use proptest::prelude::*;

    fn residual(a: &SparseMatrix, x: &[f64], b: &[f64]) -> f64 {
        let ax = a.mul_vec(x).unwrap();
        norm2(&ax.iter().zip(b).map(|(p, q)| p - q).collect::<Vec<_>>())
    }

    #[test]
    fn identity_and_diagonal() {
        let x = solve_linear(&SparseMatrix::identity(3), &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(x, [1.0, 2.0, 3.0]);
        let a = SparseMatrix::from_triplets(2, &[(0, 0, 2.0), (1, 1, 4.0)]);
        assert_eq!(solve_linear(&a, &[2.0, 4.0]).unwrap(), [1.0, 1.0]);
    }

    #[test]
    fn needs_pivoting() {
        // zero on the diagonal, nonsymmetric
        let a = SparseMatrix::from_triplets(3, &[(0, 1, 1.0), (1, 0, 1.0), (1, 2, 2.0), (2, 2, 1.0), (2, 0, 5.0)]);
        let b = [1.0, 2.0, 3.0];
        let x = solve_linear(&a, &b).unwrap();
        assert!(residual(&a, &x, &b) < 1e-12);
    }

    #[test]
    fn singular_is_reported() {
        let a = SparseMatrix::from_triplets(2, &[(0, 0, 1.0), (0, 1, 1.0), (1, 0, 2.0), (1, 1, 2.0)]);
        assert!(matches!(solve_linear(&a, &[1.0, 1.0]), Err(Error::SingularMatrix { .. })));
        let z = SparseMatrix::from_triplets(2, &[(0, 0, 1.0)]);
        assert!(matches!(solve_linear(&z, &[1.0, 1.0]), Err(Error::SingularMatrix { .. })));
    }

    #[test]
    fn dimension_mismatch() {
        assert!(matches!(
            solve_linear(&SparseMatrix::identity(3), &[1.0]),
            Err(Error::DimensionMismatch { expected: 3, got: 1 })
        ));
    }

    #[test]
    fn grid_laplacian_gets_narrow_band() {
        // 2D 5-point Laplacian on a 30 x 8 grid numbered along the long side
        let (nx, ny) = (30, 8);
        let idx = |i: usize, j: usize| i * ny + j;
        let mut t = TripletMatrix::new(nx * ny);
        for i in 0..nx {
            for j in 0..ny {
                t.push(idx(i, j), idx(i, j), 4.0);
                if i > 0 {
                    t.push(idx(i, j), idx(i - 1, j), -1.0);
                }
                if i + 1 < nx {
                    t.push(idx(i, j), idx(i + 1, j), -1.0);
                }
                if j > 0 {
                    t.push(idx(i, j), idx(i, j - 1), -1.0);
                }
                if j + 1 < ny {
                    t.push(idx(i, j), idx(i, j + 1), -1.0);
                }
            }
        }
        let a = t.finalize();
        let lu = SparseLu::factor(&a).unwrap();
        assert!(lu.bandwidth().0 <= ny + 1, "{:?}", lu.bandwidth());
        let b: Vec<f64> = (0..nx * ny).map(|k| (k as f64).sin()).collect();
        let x = lu.solve(&b).unwrap();
        assert!(residual(&a, &x, &b) < 1e-10);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn random_spd(entries in proptest::collection::vec((0usize..50, 0usize..50, -1.0f64..1.0), 100..200),
                      rhs in proptest::collection::vec(-5.0f64..5.0, 50)) {
            // A = B^T B + I
            let bmat = SparseMatrix::from_triplets(50, &entries);
            let mut t = TripletMatrix::new(50);
            for i in 0..50 {
                t.push(i, i, 1.0);
            }
            for k in 0..50 {
                let (cols, vals) = bmat.row(k);
                for (&i, &vi) in cols.iter().zip(vals) {
                    for (&j, &vj) in cols.iter().zip(vals) {
                        t.push(i, j, vi * vj);
                    }
                }
            }
            let a = t.finalize();
            let x = solve_linear(&a, &rhs).unwrap();
            prop_assert!(residual(&a, &x, &rhs) <= 1e-10 * (1.0 + norm2(&rhs)));
        }

        #[test]
        fn random_nonsymmetric_diagonally_dominant(
            entries in proptest::collection::vec((0usize..40, 0usize..40, -1.0f64..1.0), 50..150),
            rhs in proptest::collection::vec(-5.0f64..5.0, 40)) {
            let mut t = TripletMatrix::new(40);
            for &(i, j, v) in &entries {
                t.push(i, j, v);
            }
            for i in 0..40 {
                t.push(i, i, 200.0);
            }
            let a = t.finalize();
            let x = solve_linear(&a, &rhs).unwrap();
            prop_assert!(residual(&a, &x, &rhs) <= 1e-10 * (1.0 + norm2(&rhs)));
        }
    }
}
