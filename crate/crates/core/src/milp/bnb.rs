//! Best-bound branch and bound over the LP relaxation.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use super::check::check_solution;
use super::model::{MilpModel, VarKind};
use super::simplex::{solve_relaxation, LpRequest, LpStatus};
use super::{FEAS_TOL, INT_TOL};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Optimal,
    FeasibleWithGap,
    Infeasible,
    Unbounded,
    TimeLimit,
    /// A node LP exceeded the dense tableau budget; only the initial
    /// incumbent, if any, is reported.
    SizeLimit,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::FeasibleWithGap => "feasible-with-gap",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::Unbounded => "unbounded",
            SolveStatus::TimeLimit => "time-limit",
            SolveStatus::SizeLimit => "size-limit",
        }
    }
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SolveStats {
    pub nodes: usize,
    pub lp_iterations: usize,
    /// Seconds.
    pub wall_time: f64,
    pub incumbent_updates: usize,
    /// Global lower bound each time it moved.
    pub bound_history: Vec<f64>,
    /// Sub-searches run while picking the canonical optimum.
    pub refinement_solves: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MilpSolution {
    pub status: SolveStatus,
    /// Indexed by variable id; empty when no incumbent exists.
    pub values: Vec<f64>,
    pub objective: f64,
    pub best_bound: f64,
    pub gap: f64,
    pub stats: SolveStats,
}

impl MilpSolution {
    pub fn has_incumbent(&self) -> bool {
        !self.values.is_empty()
    }

    pub fn value(&self, id: usize) -> f64 {
        self.values.get(id).copied().unwrap_or(0.0)
    }

    /// Binary variable `id` is at 1.
    pub fn is_set(&self, id: usize) -> bool {
        self.value(id) > 0.5
    }
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Relative optimality gap at which search stops.
    pub gap: f64,
    /// `None` means no limit.
    pub time_limit: Option<Duration>,
    /// Starting incumbent; ignored unless it passes the checker.
    pub initial: Option<Vec<f64>>,
    /// At a proven optimum, return the lexicographically largest optimal
    /// binary vector (variables in id order).
    pub canonical: bool,
    pub max_nodes: Option<usize>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { gap: 0.0, time_limit: None, initial: None, canonical: false, max_nodes: None }
    }
}

/// Relative gap between an incumbent value and a lower bound.
pub fn relative_gap(incumbent: f64, bound: f64) -> f64 {
    if !bound.is_finite() {
        return f64::INFINITY;
    }
    ((incumbent - bound) / incumbent.abs().max(1e-9)).max(0.0)
}

pub fn solve_milp(model: &MilpModel, gap: f64, time_limit: f64) -> Result<MilpSolution> {
    let time_limit = if time_limit.is_finite() { Some(Duration::from_secs_f64(time_limit.max(0.0))) } else { None };
    solve_milp_with(model, &SolveOptions { gap, time_limit, ..Default::default() })
}

#[derive(Clone, Copy, PartialEq)]
struct Key {
    bound: f64,
    seq: u64,
}

struct Node {
    key: Key,
    fixings: Vec<(usize, bool)>,
}

impl PartialEq for Node {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Node {
    // max-heap: lowest bound first, newest node first among equal bounds
    fn cmp(&self, o: &Self) -> Ordering {
        o.key.bound.total_cmp(&self.key.bound).then(self.key.seq.cmp(&o.key.seq))
    }
}

enum End {
    Exhausted,
    Gap(f64),
    Limit(f64),
    TooLarge(f64),
    Unbounded,
}

struct Search<'a> {
    model: &'a MilpModel,
    lower: Vec<f64>,
    upper: Vec<f64>,
    cutoff: Option<f64>,
    deadline: Option<Instant>,
    gap: f64,
    find_any: bool,
    max_nodes: Option<usize>,
    incumbent: Option<(Vec<f64>, f64)>,
    stats: SolveStats,
}

fn prune_slack(inc: f64, gap: f64) -> f64 {
    gap * inc.abs().max(1e-9) + 1e-7 * inc.abs().max(1.0)
}

impl Search<'_> {
    fn timed_out(&self) -> bool {
        self.deadline.map_or(false, |d| Instant::now() >= d)
    }

    fn offer(&mut self, mut x: Vec<f64>) -> bool {
        for (v, var) in x.iter_mut().zip(&self.model.variables) {
            if var.kind == VarKind::Binary {
                *v = v.round();
            }
        }
        if !check_solution(self.model, &x, FEAS_TOL).is_empty() {
            return false;
        }
        let obj = self.model.objective_value(&x);
        if let Some(c) = self.cutoff {
            if obj > c + 1e-7 * c.abs().max(1.0) {
                return false;
            }
        }
        if self.incumbent.as_ref().map_or(true, |(_, best)| obj < *best - 1e-12) {
            self.incumbent = Some((x, obj));
            self.stats.incumbent_updates += 1;
            return true;
        }
        false
    }

    fn note_bound(&mut self, b: f64) {
        let last = self.stats.bound_history.last().copied().unwrap_or(f64::NEG_INFINITY);
        if b > last {
            self.stats.bound_history.push(b);
        }
    }

    fn run(&mut self) -> End {
        let n = self.model.variables.len();
        let mut heap = BinaryHeap::new();
        let mut seq = 0u64;
        heap.push(Node { key: Key { bound: f64::NEG_INFINITY, seq }, fixings: Vec::new() });
        let mut lo = vec![0.0; n];
        let mut hi = vec![0.0; n];
        while let Some(node) = heap.pop() {
            let bound = node.key.bound;
            if bound.is_finite() {
                self.note_bound(bound);
            }
            if let Some((_, inc)) = &self.incumbent {
                if self.find_any {
                    return End::Gap(bound);
                }
                if bound >= *inc - prune_slack(*inc, self.gap) {
                    return if heap.is_empty() && bound >= *inc - prune_slack(*inc, 0.0) {
                        End::Exhausted
                    } else {
                        End::Gap(bound)
                    };
                }
            }
            if self.timed_out() || self.max_nodes.map_or(false, |m| self.stats.nodes >= m) {
                return End::Limit(bound);
            }
            self.stats.nodes += 1;
            lo.copy_from_slice(&self.lower);
            hi.copy_from_slice(&self.upper);
            for &(j, up) in &node.fixings {
                let v = if up { 1.0 } else { 0.0 };
                lo[j] = v;
                hi[j] = v;
            }
            let out = solve_relaxation(&LpRequest {
                model: self.model,
                lower: &lo,
                upper: &hi,
                cutoff: self.cutoff,
                deadline: self.deadline,
            });
            self.stats.lp_iterations += out.iterations;
            match out.status {
                LpStatus::Optimal => {}
                LpStatus::Infeasible => continue,
                LpStatus::Unbounded => return End::Unbounded,
                LpStatus::TimeLimit => return End::Limit(bound),
                LpStatus::TooLarge => return End::TooLarge(bound),
            }
            let z = out.objective;
            if let Some((_, inc)) = &self.incumbent {
                if z >= *inc - prune_slack(*inc, self.gap) {
                    continue;
                }
            }
            let mut branch: Option<(usize, f64)> = None;
            for (j, var) in self.model.variables.iter().enumerate() {
                if var.kind != VarKind::Binary {
                    continue;
                }
                let v = out.x[j];
                let frac = v.min(1.0 - v);
                if frac > INT_TOL && branch.map_or(true, |(_, f)| frac > f + 1e-12) {
                    branch = Some((j, frac));
                }
            }
            match branch {
                None => {
                    if !self.offer(out.x) {
                        // numerically integral but rejected: fix every binary and move on
                        continue;
                    }
                    if self.find_any {
                        return End::Gap(z);
                    }
                }
                Some((j, _)) => {
                    for up in [false, true] {
                        seq += 1;
                        let mut f = node.fixings.clone();
                        f.push((j, up));
                        heap.push(Node { key: Key { bound: z, seq }, fixings: f });
                    }
                }
            }
        }
        End::Exhausted
    }
}

pub fn solve_milp_with(model: &MilpModel, opts: &SolveOptions) -> Result<MilpSolution> {
    model.validate()?;
    if !(opts.gap >= 0.0) {
        return Err(Error::Model(format!("gap must be non-negative, got {}", opts.gap)));
    }
    let start = Instant::now();
    let deadline = opts.time_limit.map(|d| start + d);
    let lower: Vec<f64> = model.variables.iter().map(|v| v.lower).collect();
    let upper: Vec<f64> = model.variables.iter().map(|v| v.upper).collect();
    let mut search = Search {
        model,
        lower: lower.clone(),
        upper: upper.clone(),
        cutoff: None,
        deadline,
        gap: opts.gap,
        find_any: false,
        max_nodes: opts.max_nodes,
        incumbent: None,
        stats: SolveStats::default(),
    };
    if let Some(init) = &opts.initial {
        if init.len() == model.variables.len() {
            search.offer(init.clone());
        }
    }

    let finish = |search: Search<'_>, status: SolveStatus, bound: f64| -> MilpSolution {
        let mut stats = search.stats;
        stats.wall_time = start.elapsed().as_secs_f64();
        match search.incumbent {
            Some((x, obj)) => {
                let bound = if bound.is_finite() { bound.min(obj) } else { bound };
                MilpSolution { status, values: x, objective: obj, best_bound: bound, gap: relative_gap(obj, bound), stats }
            }
            None => MilpSolution {
                status,
                values: Vec::new(),
                objective: f64::NAN,
                best_bound: bound,
                gap: f64::NAN,
                stats,
            },
        }
    };

    if opts.time_limit == Some(Duration::ZERO) {
        return Ok(finish(search, SolveStatus::TimeLimit, f64::NEG_INFINITY));
    }

    let end = search.run();
    let (status, bound) = match end {
        End::Unbounded => return Ok(finish(search, SolveStatus::Unbounded, f64::NEG_INFINITY)),
        End::Exhausted => match &search.incumbent {
            Some((_, obj)) => (SolveStatus::Optimal, *obj),
            None => (SolveStatus::Infeasible, f64::INFINITY),
        },
        End::Gap(b) => {
            let obj = search.incumbent.as_ref().map(|(_, o)| *o).unwrap_or(f64::NAN);
            if relative_gap(obj, b) <= 1e-9 || b >= obj - prune_slack(obj, 0.0) {
                (SolveStatus::Optimal, obj)
            } else {
                (SolveStatus::FeasibleWithGap, b)
            }
        }
        End::Limit(b) => (SolveStatus::TimeLimit, b),
        End::TooLarge(b) => (SolveStatus::SizeLimit, b),
    };

    if opts.canonical && status == SolveStatus::Optimal {
        refine_canonical(&mut search, &lower, &upper);
    }
    Ok(finish(search, status, bound))
}

/// Walks binaries in id order, pinning each to 1 whenever some optimal
/// solution agrees with the choices made so far.
fn refine_canonical(search: &mut Search<'_>, lower: &[f64], upper: &[f64]) {
    let model = search.model;
    let Some((_, zstar)) = search.incumbent.clone() else { return };
    let cutoff = zstar + 1e-7 * zstar.abs().max(1.0);
    let n = model.variables.len();
    let mut lo = lower.to_vec();
    let mut hi = upper.to_vec();

    // reduced-cost fixing from the root relaxation
    let root = solve_relaxation(&LpRequest { model, lower: &lo, upper: &hi, cutoff: None, deadline: search.deadline });
    search.stats.lp_iterations += root.iterations;
    if root.status == LpStatus::Optimal {
        for j in 0..n {
            if model.variables[j].kind == VarKind::Binary
                && root.nonbasic[j]
                && root.x[j] < 0.5
                && root.objective + root.reduced_costs[j] > cutoff
            {
                hi[j] = 0.0;
            }
        }
    }

    for j in 0..n {
        if model.variables[j].kind != VarKind::Binary || lo[j] == hi[j] {
            continue;
        }
        if search.timed_out() {
            return;
        }
        let cur = &search.incumbent.as_ref().expect("incumbent present").0;
        if cur[j] > 0.5 {
            lo[j] = 1.0;
            continue;
        }
        let mut trial_lo = lo.clone();
        trial_lo[j] = 1.0;
        let mut sub = Search {
            model,
            lower: trial_lo,
            upper: hi.clone(),
            cutoff: Some(cutoff),
            deadline: search.deadline,
            gap: 0.0,
            find_any: true,
            max_nodes: None,
            incumbent: None,
            stats: SolveStats::default(),
        };
        let end = sub.run();
        search.stats.refinement_solves += 1;
        search.stats.nodes += sub.stats.nodes;
        search.stats.lp_iterations += sub.stats.lp_iterations;
        match (end, sub.incumbent) {
            (_, Some((x, obj))) => {
                search.incumbent = Some((x, obj));
                lo[j] = 1.0;
            }
            (End::Limit(_), None) => return,
            _ => hi[j] = 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::Relation;

    #[test]
    fn cover_pair() {
        let mut m = MilpModel::new("t");
        let x = m.add_binary("x", 1.0);
        let y = m.add_binary("y", 1.0);
        m.add_constraint("c", "C", vec![(x, 1.0), (y, 1.0)], Relation::Ge, 1.0);
        let s = solve_milp(&m, 0.0, 10.0).unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        assert!((s.objective - 1.0).abs() < 1e-9);
        assert_eq!(s.gap, 0.0);
    }

    #[test]
    fn zero_time_limit() {
        let mut m = MilpModel::new("t");
        let x = m.add_binary("x", 1.0);
        m.add_constraint("c", "C", vec![(x, 1.0)], Relation::Ge, 1.0);
        let s = solve_milp(&m, 0.0, 0.0).unwrap();
        assert_eq!(s.status, SolveStatus::TimeLimit);
        assert!(!s.has_incumbent());
        let s = solve_milp_with(
            &m,
            &SolveOptions { time_limit: Some(Duration::ZERO), initial: Some(vec![1.0]), ..Default::default() },
        )
        .unwrap();
        assert_eq!(s.status, SolveStatus::TimeLimit);
        assert!(s.has_incumbent());
    }

    #[test]
    fn negative_gap_rejected() {
        let m = MilpModel::new("t");
        assert!(solve_milp(&m, -0.1, 1.0).is_err());
    }

    #[test]
    fn infeasible_binary_model() {
        let mut m = MilpModel::new("t");
        let x = m.add_binary("x", 1.0);
        let y = m.add_binary("y", 1.0);
        m.add_constraint("c", "C", vec![(x, 1.0), (y, 1.0)], Relation::Ge, 1.5);
        m.add_constraint("d", "C", vec![(x, 1.0), (y, 1.0)], Relation::Le, 1.2);
        assert_eq!(solve_milp(&m, 0.0, 10.0).unwrap().status, SolveStatus::Infeasible);
    }

    #[test]
    fn canonical_prefers_first_variable() {
        let mut m = MilpModel::new("t");
        let a = m.add_binary("a", 1.0);
        let b = m.add_binary("b", 1.0);
        let c = m.add_binary("c", 1.0);
        m.add_constraint("r", "C", vec![(a, 1.0), (b, 1.0), (c, 1.0)], Relation::Ge, 1.0);
        let s = solve_milp_with(&m, &SolveOptions { canonical: true, ..Default::default() }).unwrap();
        assert_eq!(s.values, vec![1.0, 0.0, 0.0]);
        // seeding with a different optimum does not change the answer
        let s = solve_milp_with(
            &m,
            &SolveOptions { canonical: true, initial: Some(vec![0.0, 0.0, 1.0]), ..Default::default() },
        )
        .unwrap();
        assert_eq!(s.values, vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn knapsack_with_continuous() {
        // max 5a + 4b + 3c, 2a + 3b + c <= 4 + s, s in [0, 0.5] costs 1
        let mut m = MilpModel::new("t");
        let a = m.add_binary("a", -5.0);
        let b = m.add_binary("b", -4.0);
        let c = m.add_binary("c", -3.0);
        let s = m.add_continuous("s", 0.0, 0.5, 1.0);
        m.add_constraint("k", "C", vec![(a, 2.0), (b, 3.0), (c, 1.0), (s, -1.0)], Relation::Le, 4.0);
        let r = solve_milp(&m, 0.0, 10.0).unwrap();
        assert!((r.objective + 8.0).abs() < 1e-9, "{}", r.objective);
        assert!(check_solution(&m, &r.values, 1e-6).is_empty());
    }
}
