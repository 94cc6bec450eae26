use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::greedy::{greedy_integrated, greedy_logical, greedy_routing};
use crate::error::{Error, Result};
use crate::formulation::{
    build_integrated, build_lightpath_routing, build_logical_design, decode_integrated, decode_logical, decode_routing,
    encode_integrated, encode_logical, encode_routing, IntegratedPhase, IntegratedSolution, LogicalPhase, LogicalSolution,
    RoutingPhase, RoutingSolution,
};
use crate::milp::{emit_lp_file, solve_milp_with, MilpModel, SolveOptions, SolveStatus};
use crate::model::PhysicalTopology;

/// What one phase solve did.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseRecord {
    pub phase: String,
    pub engine: String,
    pub status: String,
    #[serde(default)]
    pub objective: Option<f64>,
    #[serde(default)]
    pub best_bound: Option<f64>,
    #[serde(default)]
    pub gap: Option<f64>,
    pub variables: usize,
    pub constraints: usize,
    pub nodes: usize,
    pub lp_iterations: usize,
    /// Seconds.
    pub wall_time: f64,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

pub struct PhaseResult<T> {
    /// `None` when the phase has no feasible solution.
    pub solution: Option<T>,
    pub record: PhaseRecord,
}

/// Solves the three kinds of phase programs. The pipeline driver is shared;
/// engines differ only in how a phase is solved.
pub trait PhaseEngine {
    fn name(&self) -> &'static str;
    fn logical(&mut self, phase_name: &str, phase: &LogicalPhase) -> Result<PhaseResult<LogicalSolution>>;
    fn routing(&mut self, phase_name: &str, topology: &PhysicalTopology, phase: &RoutingPhase) -> Result<PhaseResult<RoutingSolution>>;
    fn integrated(
        &mut self,
        phase_name: &str,
        topology: &PhysicalTopology,
        phase: &IntegratedPhase,
    ) -> Result<PhaseResult<IntegratedSolution>>;
}

/// An LP file written instead of solving.
#[derive(Debug, Clone, PartialEq)]
pub struct EmittedModel {
    pub phase: String,
    pub text: String,
}

/// Branch and bound on each phase model, seeded with the greedy solution.
#[derive(Debug, Clone)]
pub struct MilpEngine {
    pub gap: f64,
    pub time_limit: Option<Duration>,
    /// Canonical tie-break at gap 0.
    pub canonical: bool,
    /// Write models instead of solving; the greedy solution carries the
    /// pipeline forward.
    pub emit_only: bool,
    pub emitted: Vec<EmittedModel>,
}

impl MilpEngine {
    pub fn new(gap: f64, time_limit: Option<Duration>) -> Self {
        MilpEngine { gap, time_limit, canonical: true, emit_only: false, emitted: Vec::new() }
    }

    fn run<T>(
        &mut self,
        phase_name: &str,
        model: &MilpModel,
        seed: Option<(T, Vec<f64>)>,
        decode: impl Fn(&[f64]) -> Result<T>,
    ) -> Result<PhaseResult<T>> {
        let mut record = PhaseRecord {
            phase: phase_name.to_string(),
            engine: self.name().to_string(),
            variables: model.variables.len(),
            constraints: model.constraints.len(),
            ..Default::default()
        };
        if self.emit_only {
            self.emitted.push(EmittedModel { phase: phase_name.to_string(), text: emit_lp_file(model) });
            record.status = "emitted".into();
            record.objective = seed.as_ref().map(|(_, x)| model.objective_value(x));
            return Ok(PhaseResult { solution: seed.map(|(s, _)| s), record });
        }
        let opts = SolveOptions {
            gap: self.gap,
            time_limit: self.time_limit,
            initial: seed.map(|(_, x)| x),
            canonical: self.canonical && self.gap == 0.0,
            max_nodes: None,
        };
        let sol = solve_milp_with(model, &opts)?;
        record.status = sol.status.as_str().to_string();
        record.objective = finite(sol.objective);
        record.best_bound = finite(sol.best_bound);
        record.gap = finite(sol.gap);
        record.nodes = sol.stats.nodes;
        record.lp_iterations = sol.stats.lp_iterations;
        record.wall_time = sol.stats.wall_time;
        if sol.has_incumbent() {
            return Ok(PhaseResult { solution: Some(decode(&sol.values)?), record });
        }
        match sol.status {
            SolveStatus::Infeasible => Ok(PhaseResult { solution: None, record }),
            SolveStatus::Unbounded => Err(Error::Model(format!("phase {phase_name} model is unbounded"))),
            _ => Err(Error::NoIncumbent { phase: phase_name.to_string(), status: sol.status.to_string() }),
        }
    }
}

impl PhaseEngine for MilpEngine {
    fn name(&self) -> &'static str {
        "milp"
    }

    fn logical(&mut self, phase_name: &str, phase: &LogicalPhase) -> Result<PhaseResult<LogicalSolution>> {
        let (model, map) = build_logical_design(phase)?;
        let seed = greedy_logical(phase).and_then(|s| encode_logical(&model, &map, &s).map(|x| (s, x)));
        self.run(phase_name, &model, seed, |v| decode_logical(phase, &map, v))
    }

    fn routing(&mut self, phase_name: &str, topology: &PhysicalTopology, phase: &RoutingPhase) -> Result<PhaseResult<RoutingSolution>> {
        let (model, map) = build_lightpath_routing(topology, phase)?;
        let seed = greedy_routing(topology, phase).and_then(|s| encode_routing(&model, &map, &s).map(|x| (s, x)));
        self.run(phase_name, &model, seed, |v| decode_routing(phase, &map, v))
    }

    fn integrated(
        &mut self,
        phase_name: &str,
        topology: &PhysicalTopology,
        phase: &IntegratedPhase,
    ) -> Result<PhaseResult<IntegratedSolution>> {
        let (model, map) = build_integrated(topology, phase)?;
        let seed = greedy_integrated(topology, phase).and_then(|s| encode_integrated(&model, &map, &s).map(|x| (s, x)));
        self.run(phase_name, &model, seed, |v| decode_integrated(phase, &map, v))
    }
}

/// Heuristic-only engine for instances beyond the solver's reach.
#[derive(Debug, Clone, Copy, Default)]
pub struct GreedyEngine;

fn greedy_record<T>(phase_name: &str, started: Instant, solution: Option<T>, objective: impl Fn(&T) -> f64) -> PhaseResult<T> {
    let record = PhaseRecord {
        phase: phase_name.to_string(),
        engine: "greedy".into(),
        status: if solution.is_some() { "heuristic" } else { "no-solution" }.into(),
        objective: solution.as_ref().map(&objective),
        wall_time: started.elapsed().as_secs_f64(),
        ..Default::default()
    };
    PhaseResult { solution, record }
}

impl PhaseEngine for GreedyEngine {
    fn name(&self) -> &'static str {
        "greedy"
    }

    fn logical(&mut self, phase_name: &str, phase: &LogicalPhase) -> Result<PhaseResult<LogicalSolution>> {
        let t = Instant::now();
        Ok(greedy_record(phase_name, t, greedy_logical(phase), |s| s.objective(phase)))
    }

    fn routing(&mut self, phase_name: &str, topology: &PhysicalTopology, phase: &RoutingPhase) -> Result<PhaseResult<RoutingSolution>> {
        let t = Instant::now();
        Ok(greedy_record(phase_name, t, greedy_routing(topology, phase), |s| {
            phase.wavelength_cost * s.wavelength_links() as f64
        }))
    }

    fn integrated(
        &mut self,
        phase_name: &str,
        topology: &PhysicalTopology,
        phase: &IntegratedPhase,
    ) -> Result<PhaseResult<IntegratedSolution>> {
        let t = Instant::now();
        Ok(greedy_record(phase_name, t, greedy_integrated(topology, phase), |s| {
            s.logical.objective(&phase.logical)
                + phase.wavelength_cost * s.paths.iter().map(|p| p.len() - 1).sum::<usize>() as f64
        }))
    }
}
