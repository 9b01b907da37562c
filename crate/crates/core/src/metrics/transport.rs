//! Exact balanced transportation problem via the transportation simplex
//! (MODI / u-v potentials) on a spanning-tree basis.
//!
//! The basis always holds `m + n - 1` cells forming a spanning tree of the
//! bipartite row/column graph; degenerate cells carry zero flow. Entering
//! cells use Dantzig's rule and fall back to Bland's rule after a run of
//! degenerate pivots, which rules out cycling.

use crate::error::{Error, Result};

const TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct TransportPlan {
    /// Row-major `m x n` flows.
    pub flow: Vec<f64>,
    pub cost: f64,
    pub rows: usize,
    pub cols: usize,
}

impl TransportPlan {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.flow[i * self.cols + j]
    }
}

/// Minimizes `sum c_ij x_ij` subject to row sums `supply`, column sums
/// `demand`, `x >= 0`. Masses must be non-negative with equal totals
/// (relative tolerance 1e-9); `cost` is row-major `m x n`.
pub fn solve(supply: &[f64], demand: &[f64], cost: &[f64]) -> Result<TransportPlan> {
    let (m, n) = (supply.len(), demand.len());
    if m == 0 || n == 0 {
        return Err(Error::EmptyInput);
    }
    if cost.len() != m * n {
        return Err(Error::DimensionMismatch {
            left: m * n,
            right: cost.len(),
        });
    }
    if supply.iter().chain(demand).any(|&x| x < 0.0 || !x.is_finite()) {
        return Err(Error::InvalidParameter("masses must be finite and non-negative".into()));
    }
    let (ts, td): (f64, f64) = (supply.iter().sum(), demand.iter().sum());
    if (ts - td).abs() > 1e-9 * ts.max(td).max(1.0) {
        return Err(Error::InvalidParameter(format!("unbalanced masses: {ts} vs {td}")));
    }
    let mut solver = Simplex::new(supply, demand, cost);
    solver.run();
    let cost_total = solver
        .flow
        .iter()
        .zip(cost)
        .map(|(x, c)| x * c)
        .sum();
    Ok(TransportPlan {
        flow: solver.flow,
        cost: cost_total,
        rows: m,
        cols: n,
    })
}

struct Simplex<'a> {
    m: usize,
    n: usize,
    cost: &'a [f64],
    flow: Vec<f64>,
    basic: Vec<bool>,
    /// Basis cells as `(row, col)`.
    basis: Vec<(usize, usize)>,
}

impl<'a> Simplex<'a> {
    /// Northwest-corner start. When a row and a column are exhausted together
    /// only one index advances, so the next cell enters the basis with zero
    /// flow and the basis stays a spanning tree.
    fn new(supply: &[f64], demand: &[f64], cost: &'a [f64]) -> Self {
        let (m, n) = (supply.len(), demand.len());
        let mut flow = vec![0.0; m * n];
        let mut basic = vec![false; m * n];
        let mut basis = Vec::with_capacity(m + n - 1);
        let mut rs = supply.to_vec();
        let mut rd = demand.to_vec();
        // absorb rounding so the last cell closes exactly
        let diff = rs.iter().sum::<f64>() - rd.iter().sum::<f64>();
        rd[n - 1] = (rd[n - 1] + diff).max(0.0);
        let (mut i, mut j) = (0, 0);
        loop {
            let x = rs[i].min(rd[j]);
            flow[i * n + j] = x;
            basic[i * n + j] = true;
            basis.push((i, j));
            let row_done = rs[i] <= rd[j];
            rs[i] -= x;
            rd[j] -= x;
            if i == m - 1 && j == n - 1 {
                break;
            }
            if i == m - 1 || (j < n - 1 && !row_done) {
                j += 1;
            } else {
                i += 1;
            }
        }
        debug_assert_eq!(basis.len(), m + n - 1);
        Self {
            m,
            n,
            cost,
            flow,
            basic,
            basis,
        }
    }

    fn potentials(&self) -> (Vec<f64>, Vec<f64>) {
        let (m, n) = (self.m, self.n);
        let mut u = vec![f64::NAN; m];
        let mut v = vec![f64::NAN; n];
        let mut row_adj: Vec<Vec<usize>> = vec![Vec::new(); m];
        let mut col_adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(i, j) in &self.basis {
            row_adj[i].push(j);
            col_adj[j].push(i);
        }
        u[0] = 0.0;
        // nodes 0..m are rows, m..m+n are columns
        let mut stack = vec![0usize];
        while let Some(node) = stack.pop() {
            if node < m {
                for &j in &row_adj[node] {
                    if v[j].is_nan() {
                        v[j] = self.cost[node * n + j] - u[node];
                        stack.push(m + j);
                    }
                }
            } else {
                let j = node - m;
                for &i in &col_adj[j] {
                    if u[i].is_nan() {
                        u[i] = self.cost[i * n + j] - v[j];
                        stack.push(i);
                    }
                }
            }
        }
        (u, v)
    }

    /// Basis cells on the tree path from row `start` to column `target`,
    /// ordered from the row end.
    fn tree_path(&self, start: usize, target: usize) -> Vec<(usize, usize)> {
        let (m, n) = (self.m, self.n);
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); m + n];
        for &(i, j) in &self.basis {
            adj[i].push(m + j);
            adj[m + j].push(i);
        }
        let mut parent = vec![usize::MAX; m + n];
        parent[start] = start;
        let mut stack = vec![start];
        while let Some(node) = stack.pop() {
            if node == m + target {
                break;
            }
            for &next in &adj[node] {
                if parent[next] == usize::MAX {
                    parent[next] = node;
                    stack.push(next);
                }
            }
        }
        let mut path = Vec::new();
        let mut node = m + target;
        while node != start {
            let prev = parent[node];
            let cell = if prev < m { (prev, node - m) } else { (node, prev - m) };
            path.push(cell);
            node = prev;
        }
        path.reverse();
        path
    }

    fn run(&mut self) {
        let (m, n) = (self.m, self.n);
        let mut degenerate_run = 0usize;
        let max_iter = 50 * (m * n + m + n) + 1000;
        for _ in 0..max_iter {
            let (u, v) = self.potentials();
            let bland = degenerate_run > m + n;
            let mut entering: Option<(usize, f64)> = None;
            for i in 0..m {
                for j in 0..n {
                    let c = i * n + j;
                    if self.basic[c] {
                        continue;
                    }
                    let reduced = self.cost[c] - u[i] - v[j];
                    let scale = 1.0 + self.cost[c].abs();
                    if reduced < -TOLERANCE * scale {
                        match entering {
                            None => entering = Some((c, reduced)),
                            Some((_, r)) if !bland && reduced < r => entering = Some((c, reduced)),
                            _ => {}
                        }
                    }
                }
                if bland && entering.is_some() {
                    break;
                }
            }
            let Some((cell, _)) = entering else { return };
            let (ei, ej) = (cell / n, cell % n);

            // cycle: entering (+), then the tree path from column ej back to
            // row ei alternates (-), (+), ...
            let mut path = self.tree_path(ei, ej);
            path.reverse();
            let minus: Vec<(usize, usize)> = path.iter().copied().step_by(2).collect();
            let plus: Vec<(usize, usize)> = path.iter().copied().skip(1).step_by(2).collect();

            let mut leaving = minus[0];
            let mut theta = f64::INFINITY;
            for &(i, j) in &minus {
                let x = self.flow[i * n + j];
                let better = x < theta || (x == theta && (bland && (i, j) < leaving));
                if better {
                    theta = x;
                    leaving = (i, j);
                }
            }
            let theta = theta.max(0.0);
            degenerate_run = if theta <= TOLERANCE { degenerate_run + 1 } else { 0 };

            self.flow[cell] += theta;
            for &(i, j) in &plus {
                self.flow[i * n + j] += theta;
            }
            for &(i, j) in &minus {
                let x = &mut self.flow[i * n + j];
                *x = (*x - theta).max(0.0);
            }
            let (li, lj) = leaving;
            self.flow[li * n + lj] = 0.0;
            self.basic[li * n + lj] = false;
            self.basic[cell] = true;
            let slot = self.basis.iter().position(|&b| b == leaving).expect("leaving cell is basic");
            self.basis[slot] = (ei, ej);
        }
        panic!("transportation simplex failed to converge");
    }
}
