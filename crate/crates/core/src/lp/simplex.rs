//! Bounded-variable revised primal simplex.
//!
//! Every row `r` gets a logical variable `s_r = a_r·x` whose bounds encode the
//! relation, so the working system is `[A | −I] z = 0` with boxed `z`. The
//! basis inverse is kept explicitly and refactored periodically; only the
//! block of basic structural columns against rows with nonbasic logicals has
//! to be inverted. Phase 1 minimizes the sum of bound violations from any
//! starting basis, which lets branch-and-bound reuse a parent basis.

use super::{LpProblem, LpSolution, LpStatus, Relation, Sense};
use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-9;
const FEAS_TOL: f64 = 1e-9;
const DUAL_TOL: f64 = 1e-9;
const SINGULAR_TOL: f64 = 1e-11;
const REFACTOR_EVERY: usize = 100;
const BLAND_AFTER: usize = 1000;
const NONE: usize = usize::MAX;

/// A simplex basis that can seed a later solve of a problem with the same
/// shape (bounds may differ).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Basis {
    basic: Vec<usize>,
    at_upper: Vec<bool>,
}

pub fn solve_lp(p: &LpProblem) -> Result<LpSolution> {
    solve_lp_warm(p, None).map(|(s, _)| s)
}

/// Solves `p`, optionally starting from `warm`, and returns the final basis.
pub fn solve_lp_warm(p: &LpProblem, warm: Option<&Basis>) -> Result<(LpSolution, Basis)> {
    p.validate()?;
    let mut s = Simplex::new(p);
    if let Some(b) = warm {
        s.load_basis(b);
    }
    s.refactor();
    s.recompute_basics();
    let outcome = s.run()?;
    let sol = s.extract(p, outcome);
    Ok((sol, s.basis()))
}

enum Outcome {
    Optimal,
    Infeasible(Vec<f64>),
    Unbounded(Vec<f64>),
}

enum Step {
    Unbounded,
    Flip(f64),
    Pivot { row: usize, t: f64, bound: f64 },
}

struct Simplex {
    m: usize,
    n: usize,
    cols: Vec<Vec<(usize, f64)>>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    cost: Vec<f64>,
    x: Vec<f64>,
    basis: Vec<usize>,
    pos: Vec<usize>,
    binv: Vec<f64>,
    iters: usize,
    degenerate: usize,
    bland: bool,
}

fn tol(bound: f64) -> f64 {
    FEAS_TOL * (1.0 + bound.abs())
}

fn resting_value(l: f64, h: f64, upper: bool) -> f64 {
    match (l.is_finite(), h.is_finite()) {
        (true, true) => {
            if upper {
                h
            } else {
                l
            }
        }
        (true, false) => l,
        (false, true) => h,
        (false, false) => 0.0,
    }
}

impl Simplex {
    fn new(p: &LpProblem) -> Self {
        let n = p.n_vars();
        let m = p.n_rows();
        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (r, row) in p.rows.iter().enumerate() {
            for &(j, a) in &row.coeffs {
                if a == 0.0 {
                    continue;
                }
                match cols[j].last_mut() {
                    Some(last) if last.0 == r => last.1 += a,
                    _ => cols[j].push((r, a)),
                }
            }
        }
        let sign = if p.sense == Sense::Maximize {
            -1.0
        } else {
            1.0
        };
        let mut lo = p.lower.clone();
        let mut hi = p.upper.clone();
        let mut cost: Vec<f64> = p.cost.iter().map(|c| sign * c).collect();
        for row in &p.rows {
            let (l, h) = match row.relation {
                Relation::Le => (f64::NEG_INFINITY, row.rhs),
                Relation::Ge => (row.rhs, f64::INFINITY),
                Relation::Eq => (row.rhs, row.rhs),
            };
            lo.push(l);
            hi.push(h);
            cost.push(0.0);
        }
        let mut x = vec![0.0; n + m];
        for j in 0..n {
            x[j] = resting_value(lo[j], hi[j], false);
        }
        let basis: Vec<usize> = (n..n + m).collect();
        let mut pos = vec![NONE; n + m];
        for (i, &k) in basis.iter().enumerate() {
            pos[k] = i;
        }
        Simplex {
            m,
            n,
            cols,
            lo,
            hi,
            cost,
            x,
            basis,
            pos,
            binv: vec![0.0; m * m],
            iters: 0,
            degenerate: 0,
            bland: false,
        }
    }

    fn load_basis(&mut self, b: &Basis) {
        let total = self.n + self.m;
        if b.basic.len() != self.m || b.at_upper.len() != total {
            return;
        }
        let mut seen = vec![false; total];
        for &k in &b.basic {
            if k >= total || seen[k] {
                return;
            }
            seen[k] = true;
        }
        self.basis = b.basic.clone();
        self.pos = vec![NONE; total];
        for (i, &k) in self.basis.iter().enumerate() {
            self.pos[k] = i;
        }
        for k in 0..total {
            if self.pos[k] == NONE {
                self.x[k] = resting_value(self.lo[k], self.hi[k], b.at_upper[k]);
            }
        }
    }

    fn basis(&self) -> Basis {
        let total = self.n + self.m;
        let at_upper = (0..total)
            .map(|k| self.pos[k] == NONE && self.hi[k].is_finite() && self.x[k] == self.hi[k])
            .collect();
        Basis {
            basic: self.basis.clone(),
            at_upper,
        }
    }

    /// Rebuilds the explicit basis inverse. Dependent structural columns are
    /// swapped for logicals of uncovered rows.
    fn refactor(&mut self) {
        let (m, n) = (self.m, self.n);
        loop {
            let mut rmap = vec![NONE; m];
            let mut rows_r = Vec::new();
            for (r, slot) in rmap.iter_mut().enumerate() {
                if self.pos[n + r] == NONE {
                    *slot = rows_r.len();
                    rows_r.push(r);
                }
            }
            let svars: Vec<(usize, usize)> = self
                .basis
                .iter()
                .enumerate()
                .filter(|(_, &k)| k < n)
                .map(|(i, &k)| (i, k))
                .collect();
            let k = svars.len();
            debug_assert_eq!(k, rows_r.len());
            let mut kmat = vec![0.0; k * k];
            for (b, &(_, j)) in svars.iter().enumerate() {
                for &(r, v) in &self.cols[j] {
                    let a = rmap[r];
                    if a != NONE {
                        kmat[a * k + b] += v;
                    }
                }
            }
            match invert(&mut kmat, k) {
                Ok(kinv) => {
                    let mut binv = vec![0.0; m * m];
                    for (b, &(i, _)) in svars.iter().enumerate() {
                        for (a, &r) in rows_r.iter().enumerate() {
                            binv[i * m + r] = kinv[b * k + a];
                        }
                    }
                    for r in 0..m {
                        let pl = self.pos[n + r];
                        if pl != NONE {
                            binv[pl * m + r] = -1.0;
                        }
                    }
                    for (b, &(_, j)) in svars.iter().enumerate() {
                        for &(r, v) in &self.cols[j] {
                            let pl = self.pos[n + r];
                            if pl == NONE {
                                continue;
                            }
                            for (a, &rr) in rows_r.iter().enumerate() {
                                binv[pl * m + rr] += v * kinv[b * k + a];
                            }
                        }
                    }
                    self.binv = binv;
                    return;
                }
                Err((dep_cols, free_rows)) => {
                    for (b, a) in dep_cols.into_iter().zip(free_rows) {
                        let (i, j) = svars[b];
                        let r = rows_r[a];
                        self.pos[j] = NONE;
                        let v = self.x[j];
                        let (l, h) = (self.lo[j], self.hi[j]);
                        self.x[j] = if l.is_finite()
                            && (!h.is_finite() || (v - l).abs() <= (h - v).abs())
                        {
                            l
                        } else if h.is_finite() {
                            h
                        } else {
                            0.0
                        };
                        self.basis[i] = n + r;
                        self.pos[n + r] = i;
                    }
                }
            }
        }
    }

    fn recompute_basics(&mut self) {
        let (m, n) = (self.m, self.n);
        let mut v = vec![0.0; m];
        for j in 0..n {
            if self.pos[j] == NONE && self.x[j] != 0.0 {
                for &(r, a) in &self.cols[j] {
                    v[r] -= a * self.x[j];
                }
            }
        }
        for (r, vr) in v.iter_mut().enumerate() {
            if self.pos[n + r] == NONE {
                *vr += self.x[n + r];
            }
        }
        for i in 0..m {
            let row = &self.binv[i * m..(i + 1) * m];
            self.x[self.basis[i]] = row.iter().zip(&v).map(|(a, b)| a * b).sum();
        }
    }

    /// Phase-1 or phase-2 basic costs; returns true in phase 1.
    fn basic_costs(&self) -> (Vec<f64>, bool) {
        let mut cb = vec![0.0; self.m];
        let mut infeasible = false;
        for (i, &k) in self.basis.iter().enumerate() {
            let z = self.x[k];
            if z < self.lo[k] - tol(self.lo[k]) {
                cb[i] = -1.0;
                infeasible = true;
            } else if z > self.hi[k] + tol(self.hi[k]) {
                cb[i] = 1.0;
                infeasible = true;
            }
        }
        if !infeasible {
            for (i, &k) in self.basis.iter().enumerate() {
                cb[i] = self.cost[k];
            }
        }
        (cb, infeasible)
    }

    fn btran(&self, cb: &[f64]) -> Vec<f64> {
        let m = self.m;
        let mut y = vec![0.0; m];
        for (i, &c) in cb.iter().enumerate() {
            if c != 0.0 {
                let row = &self.binv[i * m..(i + 1) * m];
                for (yk, a) in y.iter_mut().zip(row) {
                    *yk += c * a;
                }
            }
        }
        y
    }

    fn ftran(&self, q: usize) -> Vec<f64> {
        let m = self.m;
        let mut alpha = vec![0.0; m];
        if q < self.n {
            for &(r, a) in &self.cols[q] {
                for (i, al) in alpha.iter_mut().enumerate() {
                    *al += a * self.binv[i * m + r];
                }
            }
        } else {
            let r = q - self.n;
            for (i, al) in alpha.iter_mut().enumerate() {
                *al = -self.binv[i * m + r];
            }
        }
        alpha
    }

    fn reduced_cost(&self, k: usize, y: &[f64], phase1: bool) -> f64 {
        let c = if phase1 { 0.0 } else { self.cost[k] };
        if k < self.n {
            c - self.cols[k].iter().map(|&(r, a)| a * y[r]).sum::<f64>()
        } else {
            c + y[k - self.n]
        }
    }

    /// Entering variable and direction (+1 increase, −1 decrease).
    fn price(&self, y: &[f64], phase1: bool) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        let mut best_score = 0.0;
        for k in 0..self.n + self.m {
            if self.pos[k] != NONE {
                continue;
            }
            let (l, h) = (self.lo[k], self.hi[k]);
            if l == h {
                continue;
            }
            let d = self.reduced_cost(k, y, phase1);
            let z = self.x[k];
            let can_up = z < h;
            let can_down = z > l;
            let dir = if d < -DUAL_TOL && can_up {
                1.0
            } else if d > DUAL_TOL && can_down {
                -1.0
            } else {
                continue;
            };
            if self.bland {
                return Some((k, dir));
            }
            if d.abs() > best_score {
                best_score = d.abs();
                best = Some((k, dir));
            }
        }
        best
    }

    fn ratio(&self, q: usize, dir: f64, alpha: &[f64], phase1: bool) -> Step {
        let span = self.hi[q] - self.lo[q];
        let mut best_t = f64::INFINITY;
        let mut best: Option<(usize, f64)> = None;
        let mut best_alpha = 0.0;
        for (i, &a) in alpha.iter().enumerate() {
            if a.abs() < PIVOT_TOL {
                continue;
            }
            let rate = -dir * a;
            let k = self.basis[i];
            let z = self.x[k];
            let (l, h) = (self.lo[k], self.hi[k]);
            let below = z < l - tol(l);
            let above = z > h + tol(h);
            let (limit, bound) = if rate > 0.0 {
                if phase1 && below {
                    ((l - z) / rate, l)
                } else if above || !h.is_finite() {
                    continue;
                } else {
                    (((h - z) / rate).max(0.0), h)
                }
            } else if phase1 && above {
                ((z - h) / -rate, h)
            } else if below || !l.is_finite() {
                continue;
            } else {
                (((z - l) / -rate).max(0.0), l)
            };
            let tie = 1e-12 * (1.0 + best_t.abs().min(1e12));
            let better = match best {
                None => true,
                Some((bi, _)) => {
                    if limit < best_t - tie {
                        true
                    } else if limit <= best_t + tie {
                        if self.bland {
                            self.basis[i] < self.basis[bi]
                        } else {
                            a.abs() > best_alpha
                        }
                    } else {
                        false
                    }
                }
            };
            if better {
                best_t = limit;
                best = Some((i, bound));
                best_alpha = a.abs();
            }
        }
        match best {
            None if span.is_finite() => Step::Flip(span),
            None => Step::Unbounded,
            Some(_) if span <= best_t => Step::Flip(span),
            Some((row, bound)) => Step::Pivot {
                row,
                t: best_t,
                bound,
            },
        }
    }

    fn pivot(&mut self, r: usize, q: usize, alpha: &[f64]) {
        let m = self.m;
        let piv = alpha[r];
        let (head, tail) = self.binv.split_at_mut(r * m);
        let (prow, tail) = tail.split_at_mut(m);
        for v in prow.iter_mut() {
            *v /= piv;
        }
        for (i, &a) in alpha.iter().enumerate() {
            if i == r || a == 0.0 {
                continue;
            }
            let row = if i < r {
                &mut head[i * m..(i + 1) * m]
            } else {
                let off = (i - r - 1) * m;
                &mut tail[off..off + m]
            };
            for (v, p) in row.iter_mut().zip(prow.iter()) {
                *v -= a * p;
            }
        }
        let leaving = self.basis[r];
        self.pos[leaving] = NONE;
        self.basis[r] = q;
        self.pos[q] = r;
    }

    fn run(&mut self) -> Result<Outcome> {
        let limit = 100 * (self.m + self.n).max(1);
        let mut since = 0usize;
        loop {
            if self.iters >= limit {
                return Err(Error::IterationLimit { pivots: self.iters });
            }
            if since >= REFACTOR_EVERY {
                self.refactor();
                self.recompute_basics();
                since = 0;
            }
            let (cb, phase1) = self.basic_costs();
            let y = self.btran(&cb);
            let Some((q, dir)) = self.price(&y, phase1) else {
                if since > 0 {
                    self.refactor();
                    self.recompute_basics();
                    since = 0;
                    continue;
                }
                return Ok(if phase1 {
                    Outcome::Infeasible(y)
                } else {
                    Outcome::Optimal
                });
            };
            let alpha = self.ftran(q);
            let t = match self.ratio(q, dir, &alpha, phase1) {
                Step::Unbounded => {
                    if phase1 {
                        return Err(Error::State("phase 1 found an unbounded direction".into()));
                    }
                    let mut ray = vec![0.0; self.n];
                    if q < self.n {
                        ray[q] = dir;
                    }
                    for (i, &k) in self.basis.iter().enumerate() {
                        if k < self.n {
                            ray[k] = -dir * alpha[i];
                        }
                    }
                    return Ok(Outcome::Unbounded(ray));
                }
                Step::Flip(t) => {
                    for (i, &k) in self.basis.iter().enumerate() {
                        self.x[k] -= dir * t * alpha[i];
                    }
                    self.x[q] = if dir > 0.0 { self.hi[q] } else { self.lo[q] };
                    t
                }
                Step::Pivot { row, t, bound } => {
                    for (i, &k) in self.basis.iter().enumerate() {
                        self.x[k] -= dir * t * alpha[i];
                    }
                    self.x[q] += dir * t;
                    let leaving = self.basis[row];
                    self.x[leaving] = bound;
                    self.pivot(row, q, &alpha);
                    since += 1;
                    t
                }
            };
            if t <= 1e-11 {
                self.degenerate += 1;
                if self.degenerate >= BLAND_AFTER {
                    self.bland = true;
                }
            }
            self.iters += 1;
        }
    }

    fn extract(&self, p: &LpProblem, outcome: Outcome) -> LpSolution {
        let (n, m) = (self.n, self.m);
        let sign = if p.sense == Sense::Maximize {
            -1.0
        } else {
            1.0
        };
        let x: Vec<f64> = self.x[..n].to_vec();
        match outcome {
            Outcome::Optimal => {
                let cb: Vec<f64> = self.basis.iter().map(|&k| self.cost[k]).collect();
                let y = self.btran(&cb);
                let mut reduced: Vec<f64> = (0..n)
                    .map(|j| sign * self.reduced_cost(j, &y, false))
                    .collect();
                for &k in &self.basis {
                    if k < n {
                        reduced[k] = 0.0;
                    }
                }
                LpSolution {
                    status: LpStatus::Optimal,
                    objective: p.objective_value(&x),
                    x,
                    duals: y.iter().map(|v| sign * v).collect(),
                    reduced_costs: reduced,
                    certificate: None,
                    iterations: self.iters,
                }
            }
            Outcome::Infeasible(y) => {
                let cert = if farkas_margin(p, &y) >= farkas_margin(p, &neg(&y)) {
                    y
                } else {
                    neg(&y)
                };
                LpSolution {
                    status: LpStatus::Infeasible,
                    objective: f64::NAN,
                    x,
                    duals: vec![0.0; m],
                    reduced_costs: vec![0.0; n],
                    certificate: Some(cert),
                    iterations: self.iters,
                }
            }
            Outcome::Unbounded(ray) => LpSolution {
                status: LpStatus::Unbounded,
                objective: sign * f64::NEG_INFINITY,
                x,
                duals: vec![0.0; m],
                reduced_costs: vec![0.0; n],
                certificate: Some(ray),
                iterations: self.iters,
            },
        }
    }
}

fn neg(v: &[f64]) -> Vec<f64> {
    v.iter().map(|a| -a).collect()
}

/// Infimum of `(A^T y)·x − y·s` over the variable box and the row-bound box.
/// A positive value proves that `A x = s` has no solution in the boxes.
pub fn farkas_margin(p: &LpProblem, y: &[f64]) -> f64 {
    let mut g = vec![0.0; p.n_vars()];
    for (row, &yr) in p.rows.iter().zip(y) {
        for &(j, a) in &row.coeffs {
            g[j] += a * yr;
        }
    }
    let mut total = 0.0;
    for (j, &gj) in g.iter().enumerate() {
        if gj.abs() <= 1e-12 {
            continue;
        }
        let b = if gj > 0.0 { p.lower[j] } else { p.upper[j] };
        if !b.is_finite() {
            return f64::NEG_INFINITY;
        }
        total += gj * b;
    }
    for (row, &yr) in p.rows.iter().zip(y) {
        if yr.abs() <= 1e-12 {
            continue;
        }
        // minimize −y·s over the row interval
        let (l, h) = match row.relation {
            Relation::Le => (f64::NEG_INFINITY, row.rhs),
            Relation::Ge => (row.rhs, f64::INFINITY),
            Relation::Eq => (row.rhs, row.rhs),
        };
        let s = if yr > 0.0 { h } else { l };
        if !s.is_finite() {
            return f64::NEG_INFINITY;
        }
        total -= yr * s;
    }
    total
}

/// Gauss-Jordan inverse of a dense k×k matrix with partial pivoting.
/// On singularity returns the unpivoted columns and rows.
fn invert(a: &mut [f64], k: usize) -> std::result::Result<Vec<f64>, (Vec<usize>, Vec<usize>)> {
    let mut e = vec![0.0; k * k];
    for i in 0..k {
        e[i * k + i] = 1.0;
    }
    let mut colmax = vec![0.0f64; k];
    for i in 0..k {
        for c in 0..k {
            colmax[c] = colmax[c].max(a[i * k + c].abs());
        }
    }
    let mut used = vec![false; k];
    let mut row_of = vec![NONE; k];
    let mut dependent = Vec::new();
    for c in 0..k {
        let mut p = NONE;
        let mut pv = 0.0;
        for i in 0..k {
            if !used[i] && a[i * k + c].abs() > pv {
                pv = a[i * k + c].abs();
                p = i;
            }
        }
        if p == NONE || pv <= SINGULAR_TOL * colmax[c].max(1.0) {
            dependent.push(c);
            continue;
        }
        used[p] = true;
        row_of[c] = p;
        let inv = 1.0 / a[p * k + c];
        for j in 0..k {
            a[p * k + j] *= inv;
            e[p * k + j] *= inv;
        }
        for i in 0..k {
            if i == p {
                continue;
            }
            let f = a[i * k + c];
            if f == 0.0 {
                continue;
            }
            for j in 0..k {
                a[i * k + j] -= f * a[p * k + j];
                e[i * k + j] -= f * e[p * k + j];
            }
        }
    }
    if !dependent.is_empty() {
        let free: Vec<usize> = (0..k).filter(|&i| !used[i]).collect();
        return Err((dependent, free));
    }
    let mut inv = vec![0.0; k * k];
    for c in 0..k {
        let r = row_of[c];
        inv[c * k..(c + 1) * k].copy_from_slice(&e[r * k..(r + 1) * k]);
    }
    Ok(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{LpProblem, Relation, Sense};

    const INF: f64 = f64::INFINITY;

    #[test]
    fn trivial_lower_bound_row() {
        let mut p = LpProblem::new(Sense::Minimize);
        let x = p.add_var(1.0, 0.0, INF);
        p.add_row(vec![(x, 1.0)], Relation::Ge, 1.0);
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 1.0).abs() < 1e-12);
        assert!((s.duals[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn textbook_max() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18
        let mut p = LpProblem::new(Sense::Maximize);
        let x = p.add_var(3.0, 0.0, INF);
        let y = p.add_var(5.0, 0.0, INF);
        p.add_row(vec![(x, 1.0)], Relation::Le, 4.0);
        p.add_row(vec![(y, 2.0)], Relation::Le, 12.0);
        p.add_row(vec![(x, 3.0), (y, 2.0)], Relation::Le, 18.0);
        let s = solve_lp(&p).unwrap();
        assert!((s.objective - 36.0).abs() < 1e-9);
        assert!((s.x[0] - 2.0).abs() < 1e-9 && (s.x[1] - 6.0).abs() < 1e-9);
        let expect = [0.0, 1.5, 1.0];
        for (d, e) in s.duals.iter().zip(expect) {
            assert!((d - e).abs() < 1e-9);
        }
        assert!((s.dual_objective(&p) - 36.0).abs() < 1e-9);
    }

    #[test]
    fn free_variables_and_equalities() {
        // min x1 + x2 with x1 - x2 = 1, x1 + x2 >= 3, both free
        let mut p = LpProblem::new(Sense::Minimize);
        let a = p.add_var(1.0, -INF, INF);
        let b = p.add_var(1.0, -INF, INF);
        p.add_row(vec![(a, 1.0), (b, -1.0)], Relation::Eq, 1.0);
        p.add_row(vec![(a, 1.0), (b, 1.0)], Relation::Ge, 3.0);
        let s = solve_lp(&p).unwrap();
        assert!((s.objective - 3.0).abs() < 1e-9);
        assert!((s.duals[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_with_certificate() {
        let mut p = LpProblem::new(Sense::Minimize);
        let x = p.add_var(1.0, 0.0, 5.0);
        let y = p.add_var(1.0, 0.0, 5.0);
        p.add_row(vec![(x, 1.0), (y, 1.0)], Relation::Ge, 11.0);
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Infeasible);
        assert!(farkas_margin(&p, s.certificate.as_ref().unwrap()) > 0.0);
    }

    #[test]
    fn unbounded_with_ray() {
        let mut p = LpProblem::new(Sense::Maximize);
        let x = p.add_var(1.0, 0.0, INF);
        let y = p.add_var(0.0, 0.0, INF);
        p.add_row(vec![(x, 1.0), (y, -1.0)], Relation::Le, 2.0);
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Unbounded);
        let ray = s.certificate.unwrap();
        assert!(ray[0] > 0.0);
        assert!(ray[0] - ray[1] <= 1e-12);
    }

    #[test]
    fn empty_problem() {
        let p = LpProblem::new(Sense::Minimize);
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.objective, 0.0);
    }

    #[test]
    fn dimension_errors() {
        let mut p = LpProblem::new(Sense::Minimize);
        p.add_var(1.0, 0.0, 1.0);
        p.add_row(vec![(3, 1.0)], Relation::Le, 1.0);
        assert!(matches!(solve_lp(&p), Err(Error::Dimension(_))));
        let mut q = LpProblem::new(Sense::Minimize);
        q.add_var(1.0, 2.0, 1.0);
        assert!(matches!(solve_lp(&q), Err(Error::Dimension(_))));
    }

    #[test]
    fn warm_start_after_bound_change() {
        let mut p = LpProblem::new(Sense::Minimize);
        let x = p.add_var(-1.0, 0.0, 1.0);
        let y = p.add_var(-1.0, 0.0, 1.0);
        p.add_row(vec![(x, 1.0), (y, 1.0)], Relation::Le, 1.5);
        let (s, basis) = solve_lp_warm(&p, None).unwrap();
        assert!((s.objective + 1.5).abs() < 1e-9);
        let mut q = p.clone();
        q.upper[x] = 0.0;
        let (s2, _) = solve_lp_warm(&q, Some(&basis)).unwrap();
        assert!((s2.objective + 1.0).abs() < 1e-9);
    }

    #[test]
    fn singular_warm_basis_recovers() {
        let mut p = LpProblem::new(Sense::Minimize);
        let x = p.add_var(1.0, 0.0, INF);
        let y = p.add_var(1.0, 0.0, INF);
        p.add_row(vec![(x, 1.0), (y, 1.0)], Relation::Ge, 2.0);
        p.add_row(vec![(x, 2.0), (y, 2.0)], Relation::Ge, 4.0);
        let bad = Basis {
            basic: vec![0, 1],
            at_upper: vec![false; 4],
        };
        let (s, _) = solve_lp_warm(&p, Some(&bad)).unwrap();
        assert!((s.objective - 2.0).abs() < 1e-9);
    }
}
