//! Bounded-variable revised simplex with a dense basis inverse.
//!
//! Rows are brought to `a x + s = b` with one slack per row, variables keep
//! their own bounds and nonbasic variables sit at one of them. Phase one adds
//! artificial columns only on rows whose slack cannot absorb the initial
//! residual.

use crate::problem::{MilpProblem, Relation};

const PIVOT_TOL: f64 = 1e-9;
const DUAL_TOL: f64 = 1e-9;
const PRIMAL_TOL: f64 = 1e-9;
const DEGENERATE_RUN: u32 = 60;
const RECOMPUTE_EVERY: u64 = 60;
const REINVERT_EVERY: u64 = 400;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone)]
pub(crate) struct LpOutcome {
    pub status: LpStatus,
    /// Structural values in original units.
    pub x: Vec<f64>,
    pub iterations: u64,
}

/// A problem brought to equality form and scaled, ready for repeated solves
/// under different variable bounds.
#[derive(Debug, Clone)]
pub(crate) struct StandardLp {
    m: usize,
    n: usize,
    cols: Vec<Vec<(usize, f64)>>,
    rhs: Vec<f64>,
    slack_up: Vec<f64>,
    cost: Vec<f64>,
    col_scale: Vec<f64>,
}

fn pow2_round(x: f64) -> f64 {
    if !x.is_finite() || x <= 0.0 {
        1.0
    } else {
        2f64.powi(x.log2().round() as i32)
    }
}

impl StandardLp {
    pub fn new(problem: &MilpProblem) -> Self {
        let n = problem.num_vars();
        let m = problem.num_constraints();
        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        let mut rhs = vec![0.0; m];
        let mut slack_up = vec![f64::INFINITY; m];
        for (i, c) in problem.constraints.iter().enumerate() {
            let mut expr = c.expr.clone();
            expr.compact();
            let flip = if c.relation == Relation::Ge { -1.0 } else { 1.0 };
            for &(v, a) in &expr.terms {
                cols[v.0].push((i, flip * a));
            }
            rhs[i] = flip * (c.rhs - expr.constant);
            if c.relation == Relation::Eq {
                slack_up[i] = 0.0;
            }
        }
        let mut obj = problem.objective.clone();
        obj.compact();
        let mut cost = vec![0.0; n];
        for &(v, a) in &obj.terms {
            cost[v.0] = problem.sense.sign() * a;
        }

        // geometric scaling, a few alternating passes, powers of two only
        let mut row_scale = vec![1.0; m];
        let mut col_scale = vec![1.0; n];
        for _ in 0..6 {
            let mut rmin = vec![f64::INFINITY; m];
            let mut rmax = vec![0.0f64; m];
            for (j, col) in cols.iter().enumerate() {
                for &(i, a) in col {
                    let v = (a * row_scale[i] * col_scale[j]).abs();
                    rmin[i] = rmin[i].min(v);
                    rmax[i] = rmax[i].max(v);
                }
            }
            for i in 0..m {
                if rmax[i] > 0.0 {
                    row_scale[i] *= pow2_round(1.0 / (rmin[i] * rmax[i]).sqrt());
                }
            }
            for (j, col) in cols.iter().enumerate() {
                let mut lo = f64::INFINITY;
                let mut hi = 0.0f64;
                for &(i, a) in col {
                    let v = (a * row_scale[i] * col_scale[j]).abs();
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
                if hi > 0.0 {
                    col_scale[j] *= pow2_round(1.0 / (lo * hi).sqrt());
                }
            }
        }
        for (j, col) in cols.iter_mut().enumerate() {
            for e in col.iter_mut() {
                e.1 *= row_scale[e.0] * col_scale[j];
            }
            cost[j] *= col_scale[j];
        }
        for i in 0..m {
            rhs[i] *= row_scale[i];
        }
        let cmax = cost.iter().fold(0.0f64, |a, &c| a.max(c.abs()));
        if cmax > 0.0 {
            let s = pow2_round(1.0 / cmax);
            for c in &mut cost {
                *c *= s;
            }
        }
        StandardLp { m, n, cols, rhs, slack_up, cost, col_scale }
    }

    /// Solves with the given structural bounds (original units).
    pub fn solve(&self, lower: &[f64], upper: &[f64], iteration_limit: u64) -> LpOutcome {
        let n = self.n;
        let mut lo = Vec::with_capacity(n + self.m);
        let mut up = Vec::with_capacity(n + self.m);
        for j in 0..n {
            let (l, u) = (lower[j] / self.col_scale[j], upper[j] / self.col_scale[j]);
            if l > u + 1e-12 * l.abs().max(1.0) {
                return LpOutcome { status: LpStatus::Infeasible, x: Vec::new(), iterations: 0 };
            }
            lo.push(l);
            up.push(u.max(l));
        }
        for i in 0..self.m {
            lo.push(0.0);
            up.push(self.slack_up[i]);
        }
        let mut s = Simplex::start(self, lo, up, iteration_limit);
        let status = s.run();
        let x = if status == LpStatus::Optimal {
            (0..n).map(|j| (s.x[j] * self.col_scale[j]).clamp(lower[j], upper[j])).collect()
        } else {
            Vec::new()
        };
        LpOutcome { status, x, iterations: s.iterations }
    }
}

struct Simplex<'a> {
    lp: &'a StandardLp,
    m: usize,
    /// Structural + slack + artificial.
    total: usize,
    art_row: Vec<usize>,
    art_sign: Vec<f64>,
    lo: Vec<f64>,
    up: Vec<f64>,
    cost: Vec<f64>,
    x: Vec<f64>,
    head: Vec<usize>,
    /// Row of each basic variable, `usize::MAX` when nonbasic.
    pos: Vec<usize>,
    /// Column-major dense basis inverse.
    binv: Vec<f64>,
    iterations: u64,
    limit: u64,
    since_reinvert: u64,
}

impl<'a> Simplex<'a> {
    fn start(lp: &'a StandardLp, mut lo: Vec<f64>, mut up: Vec<f64>, limit: u64) -> Self {
        let (n, m) = (lp.n, lp.m);
        let mut x = vec![0.0; n + m];
        for j in 0..n {
            x[j] = if lo[j].is_finite() { lo[j] } else { up[j] };
        }
        let mut resid = lp.rhs.clone();
        for j in 0..n {
            if x[j] != 0.0 {
                for &(i, a) in &lp.cols[j] {
                    resid[i] -= a * x[j];
                }
            }
        }
        let mut art_row = Vec::new();
        let mut art_sign = Vec::new();
        let mut head = vec![0; m];
        let mut pos = vec![usize::MAX; n + m];
        for i in 0..m {
            let r = resid[i];
            let slack_ok = r >= -PRIMAL_TOL && r <= up[n + i] + PRIMAL_TOL;
            if slack_ok {
                head[i] = n + i;
                pos[n + i] = i;
                x[n + i] = r.clamp(0.0, up[n + i]);
            } else {
                // slack rests at the bound nearest the residual
                x[n + i] = if r < 0.0 { 0.0 } else { up[n + i] };
                let left = r - x[n + i];
                art_row.push(i);
                art_sign.push(if left >= 0.0 { 1.0 } else { -1.0 });
                let k = n + m + art_row.len() - 1;
                head[i] = k;
                x.push(left.abs());
                pos.push(i);
                lo.push(0.0);
                up.push(f64::INFINITY);
            }
        }
        let total = n + m + art_row.len();
        let mut binv = vec![0.0; m * m];
        for i in 0..m {
            let hj = head[i];
            binv[i * m + i] = if hj >= n + m { art_sign[hj - n - m] } else { 1.0 };
        }
        let mut cost = vec![0.0; total];
        for c in cost.iter_mut().skip(n + m) {
            *c = 1.0;
        }
        Simplex {
            lp,
            m,
            total,
            art_row,
            art_sign,
            lo,
            up,
            cost,
            x,
            head,
            pos,
            binv,
            iterations: 0,
            limit,
            since_reinvert: 0,
        }
    }

    fn for_column(&self, j: usize, mut f: impl FnMut(usize, f64)) {
        let (n, m) = (self.lp.n, self.m);
        if j < n {
            for &(i, a) in &self.lp.cols[j] {
                f(i, a);
            }
        } else if j < n + m {
            f(j - n, 1.0);
        } else {
            let k = j - n - m;
            f(self.art_row[k], self.art_sign[k]);
        }
    }

    fn run(&mut self) -> LpStatus {
        let n = self.lp.n;
        let m = self.m;
        if !self.art_row.is_empty() {
            match self.iterate() {
                LpStatus::Optimal => {}
                LpStatus::IterationLimit => return LpStatus::IterationLimit,
                // phase one is bounded below by zero
                _ => return LpStatus::Infeasible,
            }
            let infeas: f64 = (n + m..self.total).map(|j| self.x[j]).sum();
            if infeas > 1e-7 {
                return LpStatus::Infeasible;
            }
            for j in n + m..self.total {
                self.up[j] = 0.0;
                self.cost[j] = 0.0;
                if self.pos[j] == usize::MAX {
                    self.x[j] = 0.0;
                }
            }
            self.drive_out_artificials();
        }
        for j in 0..n {
            self.cost[j] = self.lp.cost[j];
        }
        let status = self.iterate();
        if status == LpStatus::Optimal {
            self.reinvert();
            self.recompute_basics();
        }
        status
    }

    fn drive_out_artificials(&mut self) {
        let n = self.lp.n;
        let m = self.m;
        for r in 0..m {
            let hj = self.head[r];
            if hj < n + m {
                continue;
            }
            let rho: Vec<f64> = (0..m).map(|k| self.binv[k * m + r]).collect();
            let mut best: Option<(usize, f64)> = None;
            for j in 0..n + m {
                if self.pos[j] != usize::MAX || self.up[j] - self.lo[j] <= 0.0 {
                    continue;
                }
                let mut v = 0.0;
                self.for_column(j, |i, a| v += rho[i] * a);
                if v.abs() > 1e-7 && best.is_none_or(|(_, b)| v.abs() > b.abs()) {
                    best = Some((j, v));
                }
            }
            if let Some((j, _)) = best {
                let alpha = self.ftran(j);
                self.pivot(r, j, &alpha, 0.0, 1.0);
                self.x[hj] = 0.0;
            }
        }
    }

    fn ftran(&self, j: usize) -> Vec<f64> {
        let m = self.m;
        let mut alpha = vec![0.0; m];
        self.for_column(j, |k, a| {
            let col = &self.binv[k * m..(k + 1) * m];
            for (ai, &b) in alpha.iter_mut().zip(col) {
                *ai += b * a;
            }
        });
        alpha
    }

    fn duals(&self) -> Vec<f64> {
        let m = self.m;
        let nz: Vec<(usize, f64)> =
            (0..m).filter_map(|i| { let c = self.cost[self.head[i]]; (c != 0.0).then_some((i, c)) }).collect();
        let mut y = vec![0.0; m];
        if nz.is_empty() {
            return y;
        }
        for (k, yk) in y.iter_mut().enumerate() {
            let col = &self.binv[k * m..(k + 1) * m];
            *yk = nz.iter().map(|&(i, c)| c * col[i]).sum();
        }
        y
    }

    fn reduced_cost(&self, j: usize, y: &[f64]) -> f64 {
        let mut d = self.cost[j];
        self.for_column(j, |i, a| d -= y[i] * a);
        d
    }

    /// Main loop for the current cost vector.
    fn iterate(&mut self) -> LpStatus {
        let mut degenerate = 0u32;
        let mut since_recompute = 0u64;
        loop {
            if self.iterations >= self.limit {
                return LpStatus::IterationLimit;
            }
            if since_recompute >= RECOMPUTE_EVERY {
                if self.since_reinvert >= REINVERT_EVERY {
                    self.reinvert();
                }
                self.recompute_basics();
                since_recompute = 0;
            }
            let bland = degenerate >= DEGENERATE_RUN;
            let y = self.duals();
            let mut entering: Option<(usize, f64)> = None;
            let mut best_score = 0.0;
            for j in 0..self.total {
                if self.pos[j] != usize::MAX || self.up[j] <= self.lo[j] {
                    continue;
                }
                let d = self.reduced_cost(j, &y);
                let at_upper = self.x[j] >= self.up[j] && self.up[j].is_finite();
                let at_lower = self.x[j] <= self.lo[j];
                let improving = (d < -DUAL_TOL && !at_upper) || (d > DUAL_TOL && !at_lower);
                if !improving {
                    continue;
                }
                if bland {
                    entering = Some((j, d));
                    break;
                }
                if d.abs() > best_score {
                    best_score = d.abs();
                    entering = Some((j, d));
                }
            }
            let Some((q, dq)) = entering else {
                return LpStatus::Optimal;
            };
            let dir = if dq < 0.0 { 1.0 } else { -1.0 };
            let alpha = self.ftran(q);
            let (leave, theta) = self.ratio_test(&alpha, dir, bland);
            let flip = self.up[q] - self.lo[q];
            self.iterations += 1;
            since_recompute += 1;
            match leave {
                None if !flip.is_finite() => return LpStatus::Unbounded,
                Some(_) if theta < flip => {
                    let r = leave.unwrap();
                    self.pivot(r, q, &alpha, theta, dir);
                    if theta <= 1e-12 {
                        degenerate += 1;
                    } else {
                        degenerate = 0;
                    }
                }
                _ => {
                    // entering variable runs to its opposite bound
                    for i in 0..self.m {
                        if alpha[i] != 0.0 {
                            self.x[self.head[i]] -= flip * dir * alpha[i];
                        }
                    }
                    self.x[q] = if dir > 0.0 { self.up[q] } else { self.lo[q] };
                    degenerate = 0;
                }
            }
        }
    }

    /// Two-pass Harris ratio test; plain minimum ratio with smallest-index
    /// ties when `bland` is set.
    fn ratio_test(&self, alpha: &[f64], dir: f64, bland: bool) -> (Option<usize>, f64) {
        let ratio = |i: usize, slack_tol: f64| -> Option<f64> {
            let a = dir * alpha[i];
            if a.abs() <= PIVOT_TOL {
                return None;
            }
            let b = self.head[i];
            if a > 0.0 {
                if !self.lo[b].is_finite() {
                    return None;
                }
                Some(((self.x[b] - self.lo[b] + slack_tol) / a).max(0.0))
            } else {
                if !self.up[b].is_finite() {
                    return None;
                }
                Some(((self.up[b] - self.x[b] + slack_tol) / -a).max(0.0))
            }
        };
        if bland {
            let mut best: Option<(usize, f64)> = None;
            for i in 0..self.m {
                if let Some(t) = ratio(i, 0.0) {
                    let better = match best {
                        None => true,
                        Some((bi, bt)) => t < bt - 1e-12 || (t <= bt + 1e-12 && self.head[i] < self.head[bi]),
                    };
                    if better {
                        best = Some((i, t));
                    }
                }
            }
            return match best {
                Some((i, t)) => (Some(i), t),
                None => (None, f64::INFINITY),
            };
        }
        let mut bound = f64::INFINITY;
        for i in 0..self.m {
            if let Some(t) = ratio(i, PRIMAL_TOL) {
                bound = bound.min(t);
            }
        }
        if !bound.is_finite() {
            return (None, f64::INFINITY);
        }
        let mut pick: Option<(usize, f64)> = None;
        let mut best_pivot = 0.0;
        for i in 0..self.m {
            if let Some(t) = ratio(i, 0.0) {
                if t <= bound && alpha[i].abs() > best_pivot {
                    best_pivot = alpha[i].abs();
                    pick = Some((i, t));
                }
            }
        }
        match pick {
            Some((i, t)) => (Some(i), t),
            None => (None, f64::INFINITY),
        }
    }

    fn pivot(&mut self, r: usize, q: usize, alpha: &[f64], theta: f64, dir: f64) {
        let m = self.m;
        if theta != 0.0 {
            for i in 0..m {
                if alpha[i] != 0.0 {
                    self.x[self.head[i]] -= theta * dir * alpha[i];
                }
            }
        }
        let leaving = self.head[r];
        // snap the leaving variable onto the bound it reached
        let a = dir * alpha[r];
        self.x[leaving] = if a > 0.0 { self.lo[leaving] } else { self.up[leaving] };
        if !self.x[leaving].is_finite() {
            self.x[leaving] = self.lo[leaving];
        }
        self.x[q] += theta * dir;
        self.pos[leaving] = usize::MAX;
        self.pos[q] = r;
        self.head[r] = q;

        let ar = alpha[r];
        for k in 0..m {
            let col = &mut self.binv[k * m..(k + 1) * m];
            let t = col[r] / ar;
            if t != 0.0 {
                for (i, c) in col.iter_mut().enumerate() {
                    *c -= alpha[i] * t;
                }
                col[r] = t;
            }
        }
        self.since_reinvert += 1;
    }

    fn recompute_basics(&mut self) {
        let m = self.m;
        let mut resid = self.lp.rhs.clone();
        for j in 0..self.total {
            if self.pos[j] == usize::MAX && self.x[j] != 0.0 {
                let xj = self.x[j];
                self.for_column(j, |i, a| resid[i] -= a * xj);
            }
        }
        let mut xb = vec![0.0; m];
        for (k, &rk) in resid.iter().enumerate() {
            if rk != 0.0 {
                let col = &self.binv[k * m..(k + 1) * m];
                for (v, &b) in xb.iter_mut().zip(col) {
                    *v += b * rk;
                }
            }
        }
        for i in 0..m {
            self.x[self.head[i]] = xb[i];
        }
    }

    /// Rebuilds the basis inverse by Gauss-Jordan elimination with partial
    /// pivoting. Keeps the old inverse if the basis looks singular.
    fn reinvert(&mut self) {
        let m = self.m;
        if m == 0 {
            return;
        }
        // b holds B column-major; inv starts as identity
        let mut b = vec![0.0; m * m];
        for i in 0..m {
            let hj = self.head[i];
            let col = &mut b[i * m..(i + 1) * m];
            self.for_column(hj, |k, a| col[k] = a);
        }
        // work on row-major copies for row operations
        let mut a = vec![0.0; m * m];
        for c in 0..m {
            for r in 0..m {
                a[r * m + c] = b[c * m + r];
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for c in 0..m {
            let mut p = c;
            let mut best = a[c * m + c].abs();
            for r in c + 1..m {
                let v = a[r * m + c].abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best < 1e-11 {
                return;
            }
            if p != c {
                for k in 0..m {
                    a.swap(c * m + k, p * m + k);
                    inv.swap(c * m + k, p * m + k);
                }
            }
            let piv = a[c * m + c];
            for k in 0..m {
                a[c * m + k] /= piv;
                inv[c * m + k] /= piv;
            }
            let (prow_a, prow_i) = (a[c * m..(c + 1) * m].to_vec(), inv[c * m..(c + 1) * m].to_vec());
            let nz_a: Vec<usize> = (0..m).filter(|&k| prow_a[k] != 0.0).collect();
            let nz_i: Vec<usize> = (0..m).filter(|&k| prow_i[k] != 0.0).collect();
            for r in 0..m {
                if r == c {
                    continue;
                }
                let f = a[r * m + c];
                if f == 0.0 {
                    continue;
                }
                for &k in &nz_a {
                    a[r * m + k] -= f * prow_a[k];
                }
                for &k in &nz_i {
                    inv[r * m + k] -= f * prow_i[k];
                }
            }
        }
        // inv is row-major B^-1 with rows indexed by basis position
        for r in 0..m {
            for k in 0..m {
                self.binv[k * m + r] = inv[r * m + k];
            }
        }
        self.since_reinvert = 0;
    }
}
