//! Reverse Cuthill-McKee ordering and a skyline (envelope) Cholesky factorisation.

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Reverse Cuthill-McKee permutation of an undirected graph: `perm[new] = old`.
pub fn rcm(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let deg: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    loop {
        let Some(seed) = (0..n).filter(|&i| !visited[i]).min_by_key(|&i| (deg[i], i)) else {
            break;
        };
        let start = pseudo_peripheral(adj, seed);
        visited[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut nb: Vec<usize> = adj[v].iter().copied().filter(|&w| !visited[w]).collect();
            nb.sort_by_key(|&w| (deg[w], w));
            for w in nb {
                visited[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

fn bfs_levels(adj: &[Vec<usize>], start: usize) -> (Vec<usize>, usize) {
    let mut level = vec![usize::MAX; adj.len()];
    level[start] = 0;
    let mut queue = VecDeque::from([start]);
    let mut last = start;
    while let Some(v) = queue.pop_front() {
        last = v;
        for &w in &adj[v] {
            if level[w] == usize::MAX {
                level[w] = level[v] + 1;
                queue.push_back(w);
            }
        }
    }
    let depth = level[last];
    // among the deepest level prefer the smallest degree
    let far = (0..adj.len())
        .filter(|&i| level[i] == depth)
        .min_by_key(|&i| (adj[i].len(), i))
        .unwrap_or(last);
    (level, far)
}

fn pseudo_peripheral(adj: &[Vec<usize>], seed: usize) -> usize {
    let (lv, mut far) = bfs_levels(adj, seed);
    let mut depth = lv[far];
    for _ in 0..8 {
        let (l2, f2) = bfs_levels(adj, far);
        if l2[f2] <= depth {
            break;
        }
        far = f2;
        depth = l2[f2];
    }
    far
}

/// Symmetric matrix in lower skyline storage: row `i` holds columns `first[i]..=i`.
#[derive(Debug, Clone)]
pub struct Skyline {
    first: Vec<usize>,
    ptr: Vec<usize>,
    vals: Vec<f64>,
}

impl Skyline {
    /// `first[i]` is the smallest column with a structural nonzero in row `i`.
    pub fn new(first: Vec<usize>) -> Self {
        let mut ptr = Vec::with_capacity(first.len() + 1);
        ptr.push(0);
        for (i, &f) in first.iter().enumerate() {
            debug_assert!(f <= i);
            ptr.push(ptr[i] + (i - f + 1));
        }
        let nnz = *ptr.last().unwrap();
        Self { first, ptr, vals: vec![0.0; nnz] }
    }

    pub fn dim(&self) -> usize {
        self.first.len()
    }

    pub fn profile(&self) -> usize {
        self.vals.len()
    }

    /// Storage position of entry `(i, j)` with `j <= i`.
    pub fn position(&self, i: usize, j: usize) -> usize {
        debug_assert!(j <= i && j >= self.first[i]);
        self.ptr[i] + (j - self.first[i])
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.vals
    }

    pub fn clear(&mut self) {
        self.vals.iter_mut().for_each(|v| *v = 0.0);
    }

    /// `A x` using the symmetric lower storage (before factorisation).
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut y = vec![0.0; n];
        for i in 0..n {
            let row = &self.vals[self.ptr[i]..self.ptr[i + 1]];
            let f = self.first[i];
            for (k, &a) in row.iter().enumerate() {
                let j = f + k;
                y[i] += a * x[j];
                if j != i {
                    y[j] += a * x[i];
                }
            }
        }
        y
    }

    /// In-place Cholesky `A = L L^T`.
    pub fn factor(&mut self) -> Result<()> {
        let n = self.dim();
        for i in 0..n {
            let fi = self.first[i];
            let pi = self.ptr[i];
            for j in fi..i {
                let fj = self.first[j];
                let pj = self.ptr[j];
                let k0 = fi.max(fj);
                let a = &self.vals[pi + (k0 - fi)..pi + (j - fi)];
                let b = &self.vals[pj + (k0 - fj)..pj + (j - fj)];
                let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                let ljj = self.vals[pj + (j - fj)];
                self.vals[pi + (j - fi)] = (self.vals[pi + (j - fi)] - dot) / ljj;
            }
            let row = &self.vals[pi..pi + (i - fi)];
            let d = self.vals[pi + (i - fi)] - row.iter().map(|x| x * x).sum::<f64>();
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::LinearSolve(format!("matrix not positive definite at pivot {i} ({d:e})")));
            }
            self.vals[pi + (i - fi)] = d.sqrt();
        }
        Ok(())
    }

    /// Solves `L L^T x = b` in place after [`Skyline::factor`].
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.dim();
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.vals[self.ptr[i]..self.ptr[i + 1]];
            let s: f64 = row[..i - fi].iter().zip(&b[fi..i]).map(|(l, x)| l * x).sum();
            b[i] = (b[i] - s) / row[i - fi];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let row = &self.vals[self.ptr[i]..self.ptr[i + 1]];
            b[i] /= row[i - fi];
            let xi = b[i];
            for (k, l) in row[..i - fi].iter().enumerate() {
                b[fi + k] -= l * xi;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn grid_laplacian(m: usize) -> (Vec<Vec<usize>>, Vec<(usize, usize, f64)>) {
        let idx = |i: usize, j: usize| i * m + j;
        let mut adj = vec![Vec::new(); m * m];
        let mut trip = Vec::new();
        for i in 0..m {
            for j in 0..m {
                trip.push((idx(i, j), idx(i, j), 4.0));
                if i + 1 < m {
                    adj[idx(i, j)].push(idx(i + 1, j));
                    adj[idx(i + 1, j)].push(idx(i, j));
                    trip.push((idx(i + 1, j), idx(i, j), -1.0));
                }
                if j + 1 < m {
                    adj[idx(i, j)].push(idx(i, j + 1));
                    adj[idx(i, j + 1)].push(idx(i, j));
                    trip.push((idx(i, j + 1), idx(i, j), -1.0));
                }
            }
        }
        (adj, trip)
    }

    #[test]
    fn rcm_is_a_permutation() {
        let (adj, _) = grid_laplacian(7);
        let mut p = rcm(&adj);
        p.sort_unstable();
        assert_eq!(p, (0..49).collect::<Vec<_>>());
    }

    #[test]
    fn cholesky_solves_permuted_laplacian() {
        let m = 9;
        let (adj, trip) = grid_laplacian(m);
        let perm = rcm(&adj);
        let mut inv = vec![0; perm.len()];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let n = m * m;
        let mut first: Vec<usize> = (0..n).collect();
        for &(a, b, _) in &trip {
            let (i, j) = (inv[a].max(inv[b]), inv[a].min(inv[b]));
            first[i] = first[i].min(j);
        }
        let mut sky = Skyline::new(first);
        assert!(sky.profile() < n * n / 4);
        for &(a, b, v) in &trip {
            let (i, j) = (inv[a].max(inv[b]), inv[a].min(inv[b]));
            let p = sky.position(i, j);
            sky.values_mut()[p] += v;
        }
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let mut b = sky.mul_vec(&x);
        sky.factor().unwrap();
        sky.solve_in_place(&mut b);
        for i in 0..n {
            assert_abs_diff_eq!(b[i], x[i], epsilon = 1e-12);
        }
    }

    #[test]
    fn indefinite_matrix_reported() {
        let mut sky = Skyline::new(vec![0, 0]);
        sky.values_mut().copy_from_slice(&[1.0, 2.0, 1.0]);
        assert!(matches!(sky.factor(), Err(Error::LinearSolve(_))));
    }
}
