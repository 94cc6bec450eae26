use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::failures::{enumerate_failures, lsp_outcome, FailureScenario, FailureView, Outcome};
use crate::formulation::{path_links, SurvivabilityMode};
use crate::planner::NetworkConfiguration;

/// More claims on a link's shared pool than it has wavelengths.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Contention {
    pub scenario: FailureScenario,
    pub link: usize,
    /// Activated protection lightpaths crossing the link.
    pub protection_lightpaths: Vec<usize>,
    /// Protection-LSP lightpaths in use crossing the link.
    pub spare_lightpaths: Vec<usize>,
    /// Wavelengths for protection on the link: max(s_e, w_e2) where shared.
    pub pool: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioRecord {
    pub scenario: FailureScenario,
    pub affected: Vec<usize>,
    pub recovered: Vec<usize>,
    /// Endpoint failures; lost by definition.
    pub exempt: Vec<usize>,
    /// Affected LSPs the mode does not protect.
    pub uncovered: Vec<usize>,
    pub failed: Vec<usize>,
    pub contention: Vec<Contention>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestorabilityReport {
    pub mode: SurvivabilityMode,
    pub scenarios: Vec<ScenarioRecord>,
    pub affected: usize,
    pub recovered: usize,
    pub exempt: usize,
    pub uncovered: usize,
    pub failed: usize,
    pub contention_violations: usize,
    /// recovered / (affected - exempt - uncovered); 1 when nothing is covered.
    pub restorability: f64,
}

impl RestorabilityReport {
    /// Full restorability and no contention.
    pub fn is_clean(&self) -> bool {
        self.failed == 0 && self.contention_violations == 0
    }

    /// One line per scenario, then a summary.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# restorability report, mode {}", self.mode);
        for r in &self.scenarios {
            let _ = writeln!(
                s,
                "{:<24} affected={:?} recovered={:?} exempt={:?} uncovered={:?} failed={:?} contention={}",
                r.scenario.to_string(),
                r.affected,
                r.recovered,
                r.exempt,
                r.uncovered,
                r.failed,
                r.contention.len()
            );
            for c in &r.contention {
                let _ = writeln!(
                    s,
                    "  contention link {} pool {} plp {:?} spare {:?}",
                    c.link, c.pool, c.protection_lightpaths, c.spare_lightpaths
                );
            }
        }
        let _ = writeln!(s, "scenarios {}", self.scenarios.len());
        let _ = writeln!(
            s,
            "affected {} recovered {} exempt {} uncovered {} failed {}",
            self.affected, self.recovered, self.exempt, self.uncovered, self.failed
        );
        let _ = writeln!(s, "contention violations {}", self.contention_violations);
        let _ = writeln!(s, "restorability {:.2}%", 100.0 * self.restorability);
        s
    }
}

fn scenario_record(cfg: &NetworkConfiguration, scenario: FailureScenario) -> ScenarioRecord {
    let view = FailureView::new(cfg, scenario);
    let mut rec = ScenarioRecord {
        scenario,
        affected: Vec::new(),
        recovered: Vec::new(),
        exempt: Vec::new(),
        uncovered: Vec::new(),
        failed: Vec::new(),
        contention: Vec::new(),
    };
    let mut spare = BTreeSet::new();
    let mut plps = BTreeSet::new();
    for l in &cfg.lsps {
        let Some(out) = lsp_outcome(&view, l.id) else { continue };
        rec.affected.push(l.id);
        match out {
            Outcome::Exempt => rec.exempt.push(l.id),
            Outcome::Uncovered => rec.uncovered.push(l.id),
            Outcome::Failed => rec.failed.push(l.id),
            Outcome::Recovered { protection_lightpaths, spare_lightpaths } => {
                rec.recovered.push(l.id);
                plps.extend(protection_lightpaths);
                spare.extend(spare_lightpaths);
            }
        }
    }
    if cfg.mode == SurvivabilityMode::MlInterlayerBrs {
        // optical protection switches on for every coverable failed lightpath
        for lp in &cfg.lightpaths {
            if view.optically_recoverable(lp.id) {
                if let Some(p) = view.protection_intact(lp.id) {
                    plps.insert(p);
                }
            }
        }
        let mut on_link: BTreeMap<usize, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
        for &p in &plps {
            for e in path_links(&cfg.topology, &cfg.protection_lightpaths[p].route) {
                on_link.entry(e).or_default().0.push(p);
            }
        }
        for &lp in &spare {
            for e in path_links(&cfg.topology, &cfg.lightpaths[lp].route) {
                on_link.entry(e).or_default().1.push(lp);
            }
        }
        for (e, (p, w)) in on_link {
            let u = &cfg.link_usage[e];
            let pool = u.total - u.working;
            if !p.is_empty() && !w.is_empty() && p.len() + w.len() > pool {
                rec.contention.push(Contention { scenario, link: e, protection_lightpaths: p, spare_lightpaths: w, pool });
            }
        }
    }
    rec
}

/// Simulates each scenario against the pre-planned protection.
pub fn check_restorability(cfg: &NetworkConfiguration, scenarios: &[FailureScenario]) -> RestorabilityReport {
    let records: Vec<ScenarioRecord> = scenarios.iter().map(|&s| scenario_record(cfg, s)).collect();
    let sum = |f: fn(&ScenarioRecord) -> usize| records.iter().map(f).sum::<usize>();
    let affected = sum(|r| r.affected.len());
    let recovered = sum(|r| r.recovered.len());
    let exempt = sum(|r| r.exempt.len());
    let uncovered = sum(|r| r.uncovered.len());
    let failed = sum(|r| r.failed.len());
    let contention_violations = sum(|r| r.contention.len());
    let denom = affected - exempt - uncovered;
    RestorabilityReport {
        mode: cfg.mode,
        scenarios: records,
        affected,
        recovered,
        exempt,
        uncovered,
        failed,
        contention_violations,
        restorability: if denom == 0 { 1.0 } else { recovered as f64 / denom as f64 },
    }
}

/// Shared-pool contention over the full scenario list.
pub fn contention_violations(cfg: &NetworkConfiguration) -> Vec<Contention> {
    if cfg.mode != SurvivabilityMode::MlInterlayerBrs {
        return Vec::new();
    }
    enumerate_failures(cfg).into_iter().flat_map(|s| scenario_record(cfg, s).contention).collect()
}
