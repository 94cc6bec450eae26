//! Bounded-variable primal simplex on a dense tableau.
//!
//! Two phases: artificial variables are added only for rows whose slack cannot
//! absorb the initial residual. Entering variables are chosen by Dantzig's rule
//! and the search falls back to Bland's rule after a run of degenerate pivots.

use std::time::Instant;

use super::bnb::{MilpSolution, SolveStats, SolveStatus};
use super::model::{MilpModel, Relation};
use crate::error::Result;

/// Largest tableau (rows x columns) the engine will allocate.
pub const DENSE_ENTRY_LIMIT: usize = 12_000_000;

const PIVOT_TOL: f64 = 1e-9;
const OPT_TOL: f64 = 1e-9;
const PHASE1_TOL: f64 = 1e-7;
const DEGENERATE_RUN: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    TimeLimit,
    TooLarge,
}

#[derive(Debug, Clone)]
pub(crate) struct LpOutcome {
    pub status: LpStatus,
    /// Structural variable values.
    pub x: Vec<f64>,
    /// Objective including the model offset.
    pub objective: f64,
    /// Reduced costs of the structural variables at the optimum.
    pub reduced_costs: Vec<f64>,
    /// Whether each structural variable ended nonbasic.
    pub nonbasic: Vec<bool>,
    pub iterations: usize,
}

impl LpOutcome {
    fn status_only(status: LpStatus, n: usize, iterations: usize) -> Self {
        LpOutcome {
            status,
            x: vec![0.0; n],
            objective: f64::NAN,
            reduced_costs: vec![0.0; n],
            nonbasic: vec![true; n],
            iterations,
        }
    }
}

pub(crate) struct LpRequest<'a> {
    pub model: &'a MilpModel,
    pub lower: &'a [f64],
    pub upper: &'a [f64],
    /// Adds the row `objective <= cutoff`.
    pub cutoff: Option<f64>,
    pub deadline: Option<Instant>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum State {
    Basic,
    Lower,
    Upper,
    Free,
}

struct Row {
    terms: Vec<(usize, f64)>,
    relation: Relation,
    rhs: f64,
}

struct Tableau {
    m: usize,
    nc: usize,
    n: usize,
    t: Vec<f64>,
    d: Vec<f64>,
    cost: Vec<f64>,
    lb: Vec<f64>,
    ub: Vec<f64>,
    x: Vec<f64>,
    basis: Vec<usize>,
    state: Vec<State>,
    /// Original (sparse) columns, used to recompute basic values.
    cols: Vec<Vec<(usize, f64)>>,
    b: Vec<f64>,
    iterations: usize,
}

enum PhaseEnd {
    Optimal,
    Unbounded,
    TimeLimit,
}

impl Tableau {
    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * self.nc + j]
    }

    fn recompute_duals(&mut self) {
        let nc = self.nc;
        self.d.clone_from(&self.cost);
        for i in 0..self.m {
            let cb = self.cost[self.basis[i]];
            if cb != 0.0 {
                let row = &self.t[i * nc..(i + 1) * nc];
                for (dj, &tij) in self.d.iter_mut().zip(row) {
                    *dj -= cb * tij;
                }
            }
        }
        for &bj in &self.basis {
            self.d[bj] = 0.0;
        }
    }

    /// x_B = B^-1 (b - N x_N); B^-1 is the current slack block of the tableau.
    fn refresh_basic_values(&mut self) {
        let mut r = self.b.clone();
        for j in 0..self.nc {
            if self.state[j] != State::Basic && self.x[j] != 0.0 {
                for &(i, a) in &self.cols[j] {
                    r[i] -= a * self.x[j];
                }
            }
        }
        for i in 0..self.m {
            let row = &self.t[i * self.nc + self.n..i * self.nc + self.n + self.m];
            let v: f64 = row.iter().zip(&r).map(|(a, b)| a * b).sum();
            self.x[self.basis[i]] = v;
        }
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let nc = self.nc;
        let piv = self.t[r * nc + q];
        {
            let row = &mut self.t[r * nc..(r + 1) * nc];
            for v in row.iter_mut() {
                *v /= piv;
            }
            row[q] = 1.0;
        }
        let (before, rest) = self.t.split_at_mut(r * nc);
        let (prow, after) = rest.split_at_mut(nc);
        for chunk in before.chunks_exact_mut(nc).chain(after.chunks_exact_mut(nc)) {
            let f = chunk[q];
            if f != 0.0 {
                for (v, &p) in chunk.iter_mut().zip(prow.iter()) {
                    *v -= f * p;
                }
                chunk[q] = 0.0;
            }
        }
        let dq = self.d[q];
        if dq != 0.0 {
            for (v, &p) in self.d.iter_mut().zip(prow.iter()) {
                *v -= dq * p;
            }
            self.d[q] = 0.0;
        }
    }

    fn entering(&self, bland: bool, allowed: usize) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64, f64)> = None;
        for j in 0..allowed {
            let dj = self.d[j];
            let dir = match self.state[j] {
                State::Basic => continue,
                _ if self.lb[j] == self.ub[j] => continue,
                State::Lower if dj < -OPT_TOL => 1.0,
                State::Upper if dj > OPT_TOL => -1.0,
                State::Free if dj.abs() > OPT_TOL => -dj.signum(),
                _ => continue,
            };
            if bland {
                return Some((j, dir));
            }
            if best.map_or(true, |(_, _, s)| dj.abs() > s) {
                best = Some((j, dir, dj.abs()));
            }
        }
        best.map(|(j, dir, _)| (j, dir))
    }

    fn run(&mut self, allowed: usize, deadline: Option<Instant>, max_iter: usize) -> PhaseEnd {
        let mut bland = false;
        let mut degenerate = 0usize;
        loop {
            if self.iterations >= max_iter {
                return PhaseEnd::TimeLimit;
            }
            if self.iterations % 64 == 0 {
                if let Some(dl) = deadline {
                    if Instant::now() >= dl {
                        return PhaseEnd::TimeLimit;
                    }
                }
            }
            let Some((q, dir)) = self.entering(bland, allowed) else {
                return PhaseEnd::Optimal;
            };
            self.iterations += 1;

            // ratio test
            let mut step = if self.lb[q].is_finite() && self.ub[q].is_finite() {
                self.ub[q] - self.lb[q]
            } else {
                f64::INFINITY
            };
            let mut leave: Option<(usize, bool)> = None;
            let mut leave_piv = 0.0f64;
            for i in 0..self.m {
                let a = self.at(i, q);
                if a.abs() <= PIVOT_TOL {
                    continue;
                }
                let rate = -dir * a;
                let bj = self.basis[i];
                let xv = self.x[bj];
                let (limit, to_upper) = if rate < 0.0 {
                    if !self.lb[bj].is_finite() {
                        continue;
                    }
                    (((xv - self.lb[bj]) / -rate).max(0.0), false)
                } else {
                    if !self.ub[bj].is_finite() {
                        continue;
                    }
                    (((self.ub[bj] - xv) / rate).max(0.0), true)
                };
                let better = match leave {
                    None => limit < step,
                    Some((li, _)) => {
                        if limit < step - 1e-12 {
                            true
                        } else if limit <= step + 1e-12 {
                            if bland {
                                bj < self.basis[li]
                            } else {
                                a.abs() > leave_piv
                            }
                        } else {
                            false
                        }
                    }
                };
                if better {
                    step = step.min(limit);
                    leave = Some((i, to_upper));
                    leave_piv = a.abs();
                }
            }
            if step.is_infinite() {
                return PhaseEnd::Unbounded;
            }
            if step < 1e-12 {
                degenerate += 1;
                if degenerate > DEGENERATE_RUN {
                    bland = true;
                }
            } else {
                degenerate = 0;
            }
            // move
            if step > 0.0 {
                for i in 0..self.m {
                    let a = self.at(i, q);
                    if a != 0.0 {
                        let bj = self.basis[i];
                        self.x[bj] -= dir * step * a;
                    }
                }
                self.x[q] += dir * step;
            }
            match leave {
                None => {
                    // bound flip
                    if dir > 0.0 {
                        self.state[q] = State::Upper;
                        self.x[q] = self.ub[q];
                    } else {
                        self.state[q] = State::Lower;
                        self.x[q] = self.lb[q];
                    }
                }
                Some((r, to_upper)) => {
                    let out = self.basis[r];
                    self.pivot(r, q);
                    self.basis[r] = q;
                    self.state[q] = State::Basic;
                    if to_upper {
                        self.state[out] = State::Upper;
                        self.x[out] = self.ub[out];
                    } else {
                        self.state[out] = State::Lower;
                        self.x[out] = self.lb[out];
                    }
                }
            }
        }
    }
}

pub(crate) fn solve_relaxation(req: &LpRequest<'_>) -> LpOutcome {
    let model = req.model;
    let n = model.variables.len();

    let mut rows: Vec<Row> = Vec::with_capacity(model.constraints.len() + 1);
    let mut add_row = |terms: Vec<(usize, f64)>, relation: Relation, rhs: f64| -> bool {
        let terms: Vec<(usize, f64)> = terms.into_iter().filter(|&(_, a)| a != 0.0).collect();
        if terms.is_empty() {
            return match relation {
                Relation::Le => rhs >= -1e-9,
                Relation::Ge => rhs <= 1e-9,
                Relation::Eq => rhs.abs() <= 1e-9,
            };
        }
        rows.push(Row { terms, relation, rhs });
        true
    };
    for c in &model.constraints {
        if !add_row(c.terms.clone(), c.relation, c.rhs) {
            return LpOutcome::status_only(LpStatus::Infeasible, n, 0);
        }
    }
    if let Some(cut) = req.cutoff {
        let terms = model.variables.iter().enumerate().map(|(j, v)| (j, v.objective)).collect();
        if !add_row(terms, Relation::Le, cut - model.objective_offset) {
            return LpOutcome::status_only(LpStatus::Infeasible, n, 0);
        }
    }
    for j in 0..n {
        if req.lower[j] > req.upper[j] + 1e-12 {
            return LpOutcome::status_only(LpStatus::Infeasible, n, 0);
        }
    }

    let m = rows.len();
    // initial structural values
    let mut xs = vec![0.0; n];
    let mut st = vec![State::Lower; n];
    for j in 0..n {
        let (l, u) = (req.lower[j], req.upper[j]);
        if l.is_finite() {
            xs[j] = l;
            st[j] = State::Lower;
        } else if u.is_finite() {
            xs[j] = u;
            st[j] = State::Upper;
        } else {
            xs[j] = 0.0;
            st[j] = State::Free;
        }
    }
    // decide slack-basic vs artificial per row
    let mut art_rows = Vec::new();
    let mut residual = vec![0.0; m];
    let mut slack_basic = vec![false; m];
    let mut sign = vec![1.0; m];
    for (i, row) in rows.iter().enumerate() {
        let r = row.rhs - row.terms.iter().map(|&(j, a)| a * xs[j]).sum::<f64>();
        residual[i] = r;
        let fits = match row.relation {
            Relation::Le => r >= 0.0,
            Relation::Ge => r <= 0.0,
            Relation::Eq => r == 0.0,
        };
        if fits {
            slack_basic[i] = true;
        } else {
            sign[i] = if r < 0.0 { -1.0 } else { 1.0 };
            art_rows.push(i);
        }
    }
    let na = art_rows.len();
    let nc = n + m + na;
    if m.saturating_mul(nc) > DENSE_ENTRY_LIMIT {
        return LpOutcome::status_only(LpStatus::TooLarge, n, 0);
    }

    let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nc];
    for (i, row) in rows.iter().enumerate() {
        for &(j, a) in &row.terms {
            cols[j].push((i, a));
        }
        cols[n + i].push((i, 1.0));
    }
    for (k, &i) in art_rows.iter().enumerate() {
        cols[n + m + k].push((i, sign[i]));
    }

    let mut lb = Vec::with_capacity(nc);
    let mut ub = Vec::with_capacity(nc);
    lb.extend_from_slice(req.lower);
    ub.extend_from_slice(req.upper);
    for row in &rows {
        let (l, u) = match row.relation {
            Relation::Le => (0.0, f64::INFINITY),
            Relation::Ge => (f64::NEG_INFINITY, 0.0),
            Relation::Eq => (0.0, 0.0),
        };
        lb.push(l);
        ub.push(u);
    }
    for _ in 0..na {
        lb.push(0.0);
        ub.push(f64::INFINITY);
    }

    let mut x = vec![0.0; nc];
    x[..n].copy_from_slice(&xs);
    let mut state = vec![State::Lower; nc];
    state[..n].copy_from_slice(&st);
    let mut basis = vec![0usize; m];
    let mut t = vec![0.0; m * nc];
    for (i, row) in rows.iter().enumerate() {
        let mult = if slack_basic[i] { 1.0 } else { sign[i] };
        let base = i * nc;
        for &(j, a) in &row.terms {
            t[base + j] += mult * a;
        }
        t[base + n + i] = mult;
        if slack_basic[i] {
            basis[i] = n + i;
            state[n + i] = State::Basic;
            x[n + i] = residual[i];
        } else {
            // slack parks at its finite bound (0)
            state[n + i] = if lb[n + i] == 0.0 { State::Lower } else { State::Upper };
            x[n + i] = 0.0;
        }
    }
    for (k, &i) in art_rows.iter().enumerate() {
        let c = n + m + k;
        t[i * nc + c] = 1.0;
        basis[i] = c;
        state[c] = State::Basic;
        x[c] = residual[i].abs();
    }

    let mut tab = Tableau {
        m,
        nc,
        n,
        t,
        d: vec![0.0; nc],
        cost: vec![0.0; nc],
        lb,
        ub,
        x,
        basis,
        state,
        cols,
        b: rows.iter().map(|r| r.rhs).collect(),
        iterations: 0,
    };
    let max_iter = 50_000 + 50 * (m + nc);

    if na > 0 {
        for k in 0..na {
            tab.cost[n + m + k] = 1.0;
        }
        tab.recompute_duals();
        match tab.run(nc, req.deadline, max_iter) {
            PhaseEnd::Optimal => {}
            PhaseEnd::TimeLimit => return LpOutcome::status_only(LpStatus::TimeLimit, n, tab.iterations),
            PhaseEnd::Unbounded => unreachable!("phase one objective is bounded below"),
        }
        tab.refresh_basic_values();
        let infeas: f64 = (0..na).map(|k| tab.x[n + m + k]).sum();
        let scale = 1.0 + tab.b.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if infeas > PHASE1_TOL * scale {
            return LpOutcome::status_only(LpStatus::Infeasible, n, tab.iterations);
        }
        for k in 0..na {
            let c = n + m + k;
            tab.ub[c] = 0.0;
            tab.cost[c] = 0.0;
            if tab.state[c] != State::Basic {
                tab.state[c] = State::Lower;
                tab.x[c] = 0.0;
            }
        }
    }

    for j in 0..n {
        tab.cost[j] = model.variables[j].objective;
    }
    tab.recompute_duals();
    let end = tab.run(n + m, req.deadline, max_iter);
    match end {
        PhaseEnd::Optimal => {}
        PhaseEnd::Unbounded => return LpOutcome::status_only(LpStatus::Unbounded, n, tab.iterations),
        PhaseEnd::TimeLimit => return LpOutcome::status_only(LpStatus::TimeLimit, n, tab.iterations),
    }
    tab.refresh_basic_values();

    let mut xs: Vec<f64> = tab.x[..n].to_vec();
    for (j, v) in xs.iter_mut().enumerate() {
        if v.abs() < 1e-11 {
            *v = 0.0;
        }
        // clamp drift back into bounds
        *v = v.max(req.lower[j]).min(req.upper[j]);
    }
    let objective = model.objective_value(&xs);
    LpOutcome {
        status: LpStatus::Optimal,
        x: xs,
        objective,
        reduced_costs: tab.d[..n].to_vec(),
        nonbasic: tab.state[..n].iter().map(|s| *s != State::Basic).collect(),
        iterations: tab.iterations,
    }
}

/// Solves the LP relaxation of `model` (integrality dropped).
pub fn solve_lp(model: &MilpModel) -> Result<MilpSolution> {
    model.validate()?;
    let start = Instant::now();
    let lower: Vec<f64> = model.variables.iter().map(|v| v.lower).collect();
    let upper: Vec<f64> = model.variables.iter().map(|v| v.upper).collect();
    let out = solve_relaxation(&LpRequest { model, lower: &lower, upper: &upper, cutoff: None, deadline: None });
    let status = match out.status {
        LpStatus::Optimal => SolveStatus::Optimal,
        LpStatus::Infeasible => SolveStatus::Infeasible,
        LpStatus::Unbounded => SolveStatus::Unbounded,
        LpStatus::TimeLimit => SolveStatus::TimeLimit,
        LpStatus::TooLarge => SolveStatus::SizeLimit,
    };
    let optimal = status == SolveStatus::Optimal;
    Ok(MilpSolution {
        status,
        values: if optimal { out.x } else { Vec::new() },
        objective: if optimal { out.objective } else { f64::NAN },
        best_bound: if optimal { out.objective } else { f64::NAN },
        gap: if optimal { 0.0 } else { f64::NAN },
        stats: SolveStats {
            nodes: 0,
            lp_iterations: out.iterations,
            wall_time: start.elapsed().as_secs_f64(),
            ..Default::default()
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::{check_solution, Relation};

    fn lp(model: &MilpModel) -> MilpSolution {
        solve_lp(model).unwrap()
    }

    #[test]
    fn lower_bound_row() {
        let mut m = MilpModel::new("t");
        let x = m.add_continuous("x", 0.0, f64::INFINITY, 1.0);
        m.add_constraint("c", "C", vec![(x, 1.0)], Relation::Ge, 3.0);
        let s = lp(&m);
        assert_eq!(s.status, SolveStatus::Optimal);
        assert!((s.objective - 3.0).abs() < 1e-9);
    }

    #[test]
    fn contradictory_rows_infeasible() {
        let mut m = MilpModel::new("t");
        let x = m.add_continuous("x", f64::NEG_INFINITY, f64::INFINITY, 0.0);
        m.add_constraint("a", "C", vec![(x, 1.0)], Relation::Ge, 1.0);
        m.add_constraint("b", "C", vec![(x, 1.0)], Relation::Le, 0.0);
        assert_eq!(lp(&m).status, SolveStatus::Infeasible);
    }

    #[test]
    fn unbounded_direction() {
        let mut m = MilpModel::new("t");
        let x = m.add_continuous("x", 0.0, f64::INFINITY, -1.0);
        m.add_constraint("a", "C", vec![(x, 1.0)], Relation::Ge, 0.0);
        assert_eq!(lp(&m).status, SolveStatus::Unbounded);
    }

    #[test]
    fn undeclared_variable_is_structural_error() {
        let mut m = MilpModel::new("t");
        m.add_continuous("x", 0.0, 1.0, 1.0);
        m.add_constraint("a", "C", vec![(4, 1.0)], Relation::Ge, 0.0);
        assert!(solve_lp(&m).is_err());
    }

    #[test]
    fn small_production_lp() {
        // max 3x + 5y  s.t. x <= 4, 2y <= 12, 3x + 2y <= 18  -> 36 at (2, 6)
        let mut m = MilpModel::new("t");
        let x = m.add_continuous("x", 0.0, f64::INFINITY, -3.0);
        let y = m.add_continuous("y", 0.0, f64::INFINITY, -5.0);
        m.add_constraint("a", "C", vec![(x, 1.0)], Relation::Le, 4.0);
        m.add_constraint("b", "C", vec![(y, 2.0)], Relation::Le, 12.0);
        m.add_constraint("c", "C", vec![(x, 3.0), (y, 2.0)], Relation::Le, 18.0);
        let s = lp(&m);
        assert!((s.objective + 36.0).abs() < 1e-9);
        assert!((s.values[0] - 2.0).abs() < 1e-9 && (s.values[1] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn equality_and_free_variables() {
        // min x - y, x + y = 2, x - y >= -4, y free, x in [0, 5]
        let mut m = MilpModel::new("t");
        let x = m.add_continuous("x", 0.0, 5.0, 1.0);
        let y = m.add_continuous("y", f64::NEG_INFINITY, f64::INFINITY, -1.0);
        m.add_constraint("a", "C", vec![(x, 1.0), (y, 1.0)], Relation::Eq, 2.0);
        m.add_constraint("b", "C", vec![(x, 1.0), (y, -1.0)], Relation::Ge, -4.0);
        let s = lp(&m);
        assert!((s.objective + 2.0).abs() < 1e-9, "{}", s.objective);
        assert!(check_solution(&m, &s.values, 1e-6).is_empty());
    }

    /// Cross-check against vertex enumeration on random two-variable LPs.
    #[test]
    fn random_2d_against_vertex_enumeration() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let mut m = MilpModel::new("r");
            let cx = rng.gen_range(-5.0..5.0);
            let cy = rng.gen_range(-5.0..5.0);
            let x = m.add_continuous("x", 0.0, 10.0, cx);
            let y = m.add_continuous("y", 0.0, 10.0, cy);
            let mut lines = vec![(1.0, 0.0, 0.0), (1.0, 0.0, 10.0), (0.0, 1.0, 0.0), (0.0, 1.0, 10.0)];
            let mut rows = Vec::new();
            for k in 0..rng.gen_range(1..5) {
                let a = rng.gen_range(-3.0..3.0);
                let b = rng.gen_range(-3.0..3.0);
                let r = rng.gen_range(-5.0..15.0);
                m.add_constraint(format!("r{k}"), "R", vec![(x, a), (y, b)], Relation::Le, r);
                lines.push((a, b, r));
                rows.push((a, b, r));
            }
            let feasible = |px: f64, py: f64| {
                (-1e-7..=10.0 + 1e-7).contains(&px)
                    && (-1e-7..=10.0 + 1e-7).contains(&py)
                    && rows.iter().all(|&(a, b, r)| a * px + b * py <= r + 1e-7)
            };
            let mut best = f64::INFINITY;
            for i in 0..lines.len() {
                for j in i + 1..lines.len() {
                    let (a1, b1, r1) = lines[i];
                    let (a2, b2, r2) = lines[j];
                    let det = a1 * b2 - a2 * b1;
                    if det.abs() < 1e-12 {
                        continue;
                    }
                    let px = (r1 * b2 - r2 * b1) / det;
                    let py = (a1 * r2 - a2 * r1) / det;
                    if feasible(px, py) {
                        best = best.min(cx * px + cy * py);
                    }
                }
            }
            let s = lp(&m);
            if best.is_infinite() {
                assert_eq!(s.status, SolveStatus::Infeasible);
            } else {
                assert_eq!(s.status, SolveStatus::Optimal);
                assert!((s.objective - best).abs() < 1e-6, "{} vs {}", s.objective, best);
            }
        }
    }
}
