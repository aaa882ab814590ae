//! Removal-set construction per connected component.
//!
//! Cliques keep their densest member. Other components are solved either by
//! PPIS (greedy independent set in ascending penalty order) or by MICO (exact
//! minimum-weight vertex cover under a time budget, falling back to PPIS).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cover::{solve_cover, CoverProblem, CoverStatus};
use crate::decomposition::Component;
use crate::error::{Error, Result};
use crate::graph::ConflictGraph;
use crate::scoring::{component_weights, score_component, ComponentWeights, DensityTable, TupleScore};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Ppis,
    Mico,
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ppis" => Ok(Algorithm::Ppis),
            "mico" => Ok(Algorithm::Mico),
            other => Err(Error::Config(format!("unknown algorithm {other:?}"))),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Ppis => "ppis",
            Algorithm::Mico => "mico",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Strategy {
    CliqueRetain,
    #[serde(rename = "PPIS")]
    Ppis,
    #[serde(rename = "MICO-Optimal")]
    MicoOptimal,
    #[serde(rename = "MICO-Feasible")]
    MicoFeasible,
    #[serde(rename = "MICO-Fallback")]
    MicoFallback,
}

impl Strategy {
    pub const ALL: [Strategy; 5] = [
        Strategy::CliqueRetain,
        Strategy::Ppis,
        Strategy::MicoOptimal,
        Strategy::MicoFeasible,
        Strategy::MicoFallback,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Strategy::CliqueRetain => "CliqueRetain",
            Strategy::Ppis => "PPIS",
            Strategy::MicoOptimal => "MICO-Optimal",
            Strategy::MicoFeasible => "MICO-Feasible",
            Strategy::MicoFallback => "MICO-Fallback",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RepairConfig {
    pub algorithm: Algorithm,
    pub epsilon: f64,
    /// Wall-clock budget per component for the exact solver.
    pub time_limit: Duration,
    /// Solve components on the rayon pool instead of one after another.
    pub parallel: bool,
}

impl Default for RepairConfig {
    fn default() -> Self {
        RepairConfig {
            algorithm: Algorithm::Ppis,
            epsilon: crate::scoring::DEFAULT_EPSILON,
            time_limit: Duration::from_secs(10),
            parallel: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentTrace {
    pub component_id: usize,
    pub size: usize,
    pub edge_count: usize,
    pub is_clique: bool,
    pub strategy: Strategy,
    pub weights: ComponentWeights,
    pub local_removal: Vec<usize>,
    /// Σ Cost(v) over the local removal, with Cost = P_max − penalty + ε.
    pub objective_value: f64,
    pub solver_nodes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub eta: f64,
    /// `None` when the retained penalty is zero while `η > 0`.
    pub ratio_bound: Option<f64>,
    pub k: usize,
    pub r: usize,
    pub c: usize,
    pub n: usize,
    pub rho_max: f64,
    pub rho_min: f64,
    pub rho_small: f64,
    pub w_density: f64,
    /// Penalty of the retained conflicting rows, standing in for the unknown
    /// optimum. The ratio is therefore reported, not certified.
    pub retained_penalty: f64,
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepairPlan {
    pub row_count: usize,
    pub algorithm: Algorithm,
    pub epsilon: f64,
    pub removal_set: Vec<usize>,
    pub retained_set: Vec<usize>,
    pub per_component: Vec<ComponentTrace>,
    pub bound: Option<BoundReport>,
    #[serde(skip)]
    pub scores: BTreeMap<usize, TupleScore>,
}

impl RepairPlan {
    pub fn strategy_counts(&self) -> BTreeMap<Strategy, usize> {
        let mut counts = BTreeMap::new();
        for t in &self.per_component {
            *counts.entry(t.strategy).or_insert(0) += 1;
        }
        counts
    }

    pub fn is_removed(&self, row: usize) -> bool {
        self.removal_set.binary_search(&row).is_ok()
    }
}

/// Keeps the densest member (lowest row id on ties) and removes the rest.
///
/// # Panics
/// If the component is empty.
pub fn repair_clique(component: &Component, density: &DensityTable) -> Vec<usize> {
    let keep = clique_keeper(component, density);
    component
        .members
        .iter()
        .copied()
        .filter(|&v| v != keep)
        .collect()
}

fn clique_keeper(component: &Component, density: &DensityTable) -> usize {
    let mut keep = component.members[0];
    for &v in &component.members[1..] {
        if density.get(v) > density.get(keep) {
            keep = v;
        }
    }
    keep
}

/// Ascending penalty, lower row id first on ties.
fn penalty_order(component: &Component, scores: &BTreeMap<usize, TupleScore>) -> Vec<usize> {
    let mut order = component.members.clone();
    order.sort_by(|a, b| scores[a].penalty.total_cmp(&scores[b].penalty).then(a.cmp(b)));
    order
}

/// Greedy maximal independent set in penalty order. Returns
/// `(independent, removal)`, both ascending.
pub fn ppis_partition(
    component: &Component,
    scores: &BTreeMap<usize, TupleScore>,
    graph: &ConflictGraph,
) -> (Vec<usize>, Vec<usize>) {
    let mut independent = Vec::new();
    let mut removal = Vec::new();
    for v in penalty_order(component, scores) {
        let blocked = graph
            .neighbors(v)
            .iter()
            .any(|u| independent.binary_search(u).is_ok());
        if blocked {
            removal.push(v);
        } else {
            let at = independent.partition_point(|&x| x < v);
            independent.insert(at, v);
        }
    }
    removal.sort_unstable();
    (independent, removal)
}

pub fn repair_ppis(
    component: &Component,
    scores: &BTreeMap<usize, TupleScore>,
    graph: &ConflictGraph,
) -> Vec<usize> {
    ppis_partition(component, scores, graph).1
}

/// `Cost(v) = P_max − penalty(v) + ε`, indexed like `component.members`.
pub fn cover_costs(
    component: &Component,
    scores: &BTreeMap<usize, TupleScore>,
    epsilon: f64,
) -> Vec<f64> {
    let p_max = component
        .members
        .iter()
        .map(|v| scores[v].penalty)
        .fold(f64::NEG_INFINITY, f64::max);
    component
        .members
        .iter()
        .map(|v| p_max - scores[v].penalty + epsilon)
        .collect()
}

pub fn cover_model(
    component: &Component,
    scores: &BTreeMap<usize, TupleScore>,
    graph: &ConflictGraph,
    epsilon: f64,
) -> CoverProblem {
    let local = |row: usize| component.members.binary_search(&row).expect("member");
    let edges = component.members.iter().flat_map(|&u| {
        graph
            .neighbors(u)
            .iter()
            .filter(move |&&v| v > u)
            .map(move |&v| (local(u), local(v)))
    });
    CoverProblem::new(cover_costs(component, scores, epsilon), edges)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MicoOutcome {
    pub removal: Vec<usize>,
    pub strategy: Strategy,
    pub objective: f64,
    pub nodes: u64,
}

pub fn repair_mico(
    component: &Component,
    scores: &BTreeMap<usize, TupleScore>,
    graph: &ConflictGraph,
    time_budget: Duration,
    epsilon: f64,
) -> MicoOutcome {
    let greedy = repair_ppis(component, scores, graph);
    let problem = cover_model(component, scores, graph, epsilon);
    let to_local = |rows: &[usize]| -> Vec<usize> {
        rows.iter()
            .map(|r| component.members.binary_search(r).expect("member"))
            .collect()
    };
    let seed = to_local(&greedy);
    let outcome = solve_cover(&problem, Some(&seed), time_budget);

    let strategy = match outcome.status {
        CoverStatus::Optimal => Strategy::MicoOptimal,
        CoverStatus::Feasible => Strategy::MicoFeasible,
        CoverStatus::NoIncumbent => Strategy::MicoFallback,
    };
    match outcome.cover {
        Some(cover) => MicoOutcome {
            removal: cover.iter().map(|&i| component.members[i]).collect(),
            strategy,
            objective: outcome.objective,
            nodes: outcome.nodes,
        },
        None => MicoOutcome {
            objective: problem.objective(&seed),
            removal: greedy,
            strategy: Strategy::MicoFallback,
            nodes: outcome.nodes,
        },
    }
}

fn removal_objective(
    component: &Component,
    scores: &BTreeMap<usize, TupleScore>,
    removal: &[usize],
    epsilon: f64,
) -> f64 {
    let costs = cover_costs(component, scores, epsilon);
    removal
        .iter()
        .map(|r| costs[component.members.binary_search(r).expect("member")])
        .sum()
}

struct Solved {
    trace: ComponentTrace,
    scores: BTreeMap<usize, TupleScore>,
}

fn solve_component(
    component: &Component,
    graph: &ConflictGraph,
    density: &DensityTable,
    config: &RepairConfig,
) -> Solved {
    let weights = component_weights(component, density, graph);
    let scores = score_component(component, density, graph, &weights, config.epsilon);
    let (strategy, local_removal, nodes) = if component.is_clique {
        (Strategy::CliqueRetain, repair_clique(component, density), 0)
    } else {
        match config.algorithm {
            Algorithm::Ppis => (Strategy::Ppis, repair_ppis(component, &scores, graph), 0),
            Algorithm::Mico => {
                let out = repair_mico(component, &scores, graph, config.time_limit, config.epsilon);
                (out.strategy, out.removal, out.nodes)
            }
        }
    };
    let objective_value = removal_objective(component, &scores, &local_removal, config.epsilon);
    Solved {
        trace: ComponentTrace {
            component_id: component.id,
            size: component.len(),
            edge_count: component.edge_count,
            is_clique: component.is_clique,
            strategy,
            weights,
            local_removal,
            objective_value,
            solver_nodes: nodes,
        },
        scores,
    }
}

/// Solves every component and merges the local removals. Fails only if the
/// merged removal is not a vertex cover of `graph`.
pub fn repair(
    graph: &ConflictGraph,
    components: &[Component],
    density: &DensityTable,
    config: &RepairConfig,
) -> Result<RepairPlan> {
    if config.epsilon.is_nan() || config.epsilon <= 0.0 {
        return Err(Error::Config(format!(
            "epsilon must be positive, got {}",
            config.epsilon
        )));
    }
    let solved: Vec<Solved> = if config.parallel {
        components
            .par_iter()
            .map(|c| solve_component(c, graph, density, config))
            .collect()
    } else {
        components
            .iter()
            .map(|c| solve_component(c, graph, density, config))
            .collect()
    };

    let mut removal_set = Vec::new();
    let mut scores = BTreeMap::new();
    let mut per_component = Vec::with_capacity(solved.len());
    for s in solved {
        removal_set.extend_from_slice(&s.trace.local_removal);
        scores.extend(s.scores);
        per_component.push(s.trace);
    }
    removal_set.sort_unstable();
    if !graph.is_vertex_cover(&removal_set) {
        return Err(Error::Invariant(
            "merged removal set leaves a conflict uncovered".into(),
        ));
    }
    let retained_set = {
        let mut removed = vec![false; graph.row_count()];
        for &r in &removal_set {
            removed[r] = true;
        }
        (0..graph.row_count()).filter(|&r| !removed[r]).collect()
    };

    Ok(RepairPlan {
        row_count: graph.row_count(),
        algorithm: config.algorithm,
        epsilon: config.epsilon,
        removal_set,
        retained_set,
        per_component,
        bound: None,
        scores,
    })
}

/// `η = w₁ · k(r + c)(ρ_max − ρ_min) / ρ_small²`; zero for a flat density range.
pub fn eta(w_density: f64, k: usize, r: usize, c: usize, rho_max: f64, rho_min: f64, rho_small: f64) -> f64 {
    let spread = rho_max - rho_min;
    if spread <= 0.0 {
        return 0.0;
    }
    w_density * (k * (r + c)) as f64 * spread / (rho_small * rho_small)
}

/// `1 + 2nη / penalty`, with 1 for empty data or `η = 0`.
pub fn ratio_bound(n: usize, eta: f64, penalty: f64) -> Option<f64> {
    if n == 0 || eta == 0.0 {
        Some(1.0)
    } else if penalty > 0.0 {
        Some(1.0 + 2.0 * n as f64 * eta / penalty)
    } else {
        None
    }
}

/// Diagnostic approximation report for a finished plan. The density weight is
/// the largest one used by any component; `ρ_small` is the smallest density,
/// floored at the plan's `ε`.
pub fn approximation_bound(
    plan: &RepairPlan,
    density: &DensityTable,
    graph: &ConflictGraph,
    k: usize,
) -> BoundReport {
    let n = plan.row_count;
    let c = graph.vertex_count();
    let r = n - c;
    let (rho_max, rho_min) = if density.rho.is_empty() {
        (0.0, 0.0)
    } else {
        (density.max(), density.min())
    };
    let rho_small = rho_min.max(plan.epsilon);
    let w_density = plan
        .per_component
        .iter()
        .map(|t| t.weights.w_density)
        .fold(0.0, f64::max);
    let retained_penalty: f64 = plan
        .retained_set
        .iter()
        .filter_map(|r| plan.scores.get(r))
        .map(|s| s.penalty)
        .sum();
    let eta = eta(w_density, k, r, c, rho_max, rho_min, rho_small);
    BoundReport {
        eta,
        ratio_bound: ratio_bound(n, eta, retained_penalty),
        k,
        r,
        c,
        n,
        rho_max,
        rho_min,
        rho_small,
        w_density,
        retained_penalty,
        certified: false,
    }
}
