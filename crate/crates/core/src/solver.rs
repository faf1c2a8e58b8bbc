//! Column generation driver and the price-and-branch integer stage.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{reconstruct_solution_path, TimeExpandedGraph};
use crate::master::{init_master, DualSnapshot, MasterError, MasterState};
use crate::model::{Instance, Solution, SolutionPath};
use crate::pricing::{pricing_filter, AStarPricer, DijkstraPricer, PricingEngine, PricingResult};
use crate::simplex::{LpEngine, LpStatus, RevisedSimplex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PricerKind {
    AStar,
    Dijkstra,
}

impl std::str::FromStr for PricerKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "astar" => Ok(Self::AStar),
            "dijkstra" => Ok(Self::Dijkstra),
            _ => Err(format!("unknown pricer `{s}` (expected astar or dijkstra)")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CgConfig {
    pub use_filter: bool,
    pub pricer: PricerKind,
    pub max_iterations: usize,
    pub time_limit: Option<Duration>,
    /// Optimality gap tolerance between the master objective and the lower bound.
    pub tol: f64,
    /// Dual comparison and filter threshold.
    pub tol_dual: f64,
    /// A pricing objective below `-tol_reduced` yields a column.
    pub tol_reduced: f64,
    /// Recorded in reports; the algorithm itself is deterministic.
    pub seed: u64,
    /// Pricing worker threads; 0 uses all cores.
    pub threads: usize,
    pub node_limit: usize,
}

impl Default for CgConfig {
    fn default() -> Self {
        Self {
            use_filter: true,
            pricer: PricerKind::AStar,
            max_iterations: 10_000,
            time_limit: None,
            tol: 1e-6,
            tol_dual: 1e-9,
            tol_reduced: 1e-7,
            seed: 0,
            threads: 0,
            node_limit: 100_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CgStatus {
    Optimal,
    IterLimit,
    TimeLimit,
}

#[derive(Debug, Clone, Serialize)]
pub struct IterationLog {
    pub iteration: usize,
    pub objective: f64,
    pub lb: f64,
    pub pool_size: usize,
    /// Size of the filtered passenger set; all passengers on unfiltered runs.
    pub candidates: usize,
    pub priced: usize,
    pub columns_added: usize,
    pub full_pass: bool,
    pub expanded: usize,
    pub millis: u128,
}

#[derive(Debug, Clone, Serialize)]
pub struct CgReport {
    pub status: CgStatus,
    pub objective: f64,
    pub lb: f64,
    pub iterations: Vec<IterationLog>,
    pub total_priced: usize,
    pub total_expanded: usize,
    pub seed: u64,
}

impl CgReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iteration,objective,lb,pool_size,priced,columns_added,millis\n");
        for it in &self.iterations {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                it.iteration, it.objective, it.lb, it.pool_size, it.priced, it.columns_added, it.millis
            );
        }
        out
    }
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error(transparent)]
    Master(#[from] MasterError),
    #[error("could not start the pricing worker pool: {0}")]
    Threads(String),
}

/// Builds the configured pricing engine.
pub fn make_pricer(g: &TimeExpandedGraph, kind: PricerKind) -> Box<dyn PricingEngine> {
    match kind {
        PricerKind::AStar => Box::new(AStarPricer::new(g)),
        PricerKind::Dijkstra => Box::new(DijkstraPricer),
    }
}

pub fn run_column_generation(
    g: &TimeExpandedGraph,
    inst: &Instance,
    cfg: &CgConfig,
) -> Result<(MasterState, CgReport), SolveError> {
    let pricer = make_pricer(g, cfg.pricer);
    run_column_generation_with(g, inst, cfg, pricer.as_ref(), &RevisedSimplex::default())
}

/// Column generation with explicit pricing and LP engines.
pub fn run_column_generation_with(
    g: &TimeExpandedGraph,
    inst: &Instance,
    cfg: &CgConfig,
    pricer: &dyn PricingEngine,
    lp_engine: &dyn LpEngine,
) -> Result<(MasterState, CgReport), SolveError> {
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| SolveError::Threads(e.to_string()))?;
    let penalty = inst.params.penalty;
    let n = g.passenger_count();
    let mut ms = init_master(g, inst);
    let mut log = Vec::new();
    // Path costs are non-negative, so zero is a valid starting bound.
    let mut lb = 0.0f64;
    let mut prev: Option<(DualSnapshot, bool)> = None;
    let mut objective;
    let mut total_priced = 0;
    let mut total_expanded = 0;

    let price = |passengers: &[usize], duals: &DualSnapshot| -> Vec<PricingResult> {
        pool.install(|| passengers.par_iter().map(|&p| pricer.price(g, duals, p, penalty)).collect())
    };

    let status = loop {
        let it_start = Instant::now();
        let (obj, duals) = ms.solve_with(lp_engine)?;
        objective = obj;
        if lb >= obj - cfg.tol {
            break CgStatus::Optimal;
        }
        if let Some((old, true)) = &prev {
            if old.same_as(&duals, cfg.tol_dual) {
                break CgStatus::Optimal;
            }
        }
        if log.len() >= cfg.max_iterations {
            break CgStatus::IterLimit;
        }
        if cfg.time_limit.is_some_and(|t| start.elapsed() >= t) {
            break CgStatus::TimeLimit;
        }

        let (candidates, mut full) = if cfg.use_filter {
            let pi = pricing_filter(&ms, &duals, cfg.tol_dual);
            let full = pi.len() == n;
            (pi, full)
        } else {
            ((0..n).collect(), true)
        };
        let n_candidates = candidates.len();
        let mut results = price(&candidates, &duals);
        let improving = |r: &PricingResult| r.path.is_some() && r.objective < -cfg.tol_reduced;
        if !full && !results.iter().any(improving) {
            let mut seen = vec![false; n];
            candidates.iter().for_each(|&p| seen[p] = true);
            let rest: Vec<usize> = (0..n).filter(|&p| !seen[p]).collect();
            results.extend(price(&rest, &duals));
            results.sort_by_key(|r| r.passenger);
            full = true;
        }

        let mut added = 0;
        let mut beta = obj;
        for r in &results {
            total_expanded += r.expanded;
            if improving(r) {
                beta += r.objective;
                let (_, new) = ms.add_path_column(g, r.passenger, r.path.as_ref().unwrap())?;
                added += usize::from(new);
            }
        }
        total_priced += results.len();
        if full {
            lb = lb.max(if added == 0 { obj } else { beta });
        }
        log.push(IterationLog {
            iteration: log.len() + 1,
            objective: obj,
            lb,
            pool_size: ms.columns().len(),
            candidates: n_candidates,
            priced: results.len(),
            columns_added: added,
            full_pass: full,
            expanded: results.iter().map(|r| r.expanded).sum(),
            millis: it_start.elapsed().as_millis(),
        });
        if full && added == 0 {
            break CgStatus::Optimal;
        }
        prev = Some((duals, full));
    };

    let report = CgReport { status, objective, lb: lb.min(objective), iterations: log, total_priced, total_expanded, seed: cfg.seed };
    Ok((ms, report))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BranchStatus {
    Optimal,
    NodeLimit,
    TimeLimit,
}

#[derive(Debug, Clone, Serialize)]
pub struct IntegerResult {
    pub solution: Solution,
    /// Pool column chosen per passenger.
    pub chosen: Vec<usize>,
    pub bound: f64,
    pub gap: f64,
    pub nodes: usize,
    pub status: BranchStatus,
}

/// Solves the integer program over the pooled columns by depth-first
/// branch-and-bound. The all-dummy assignment is the starting incumbent.
pub fn price_and_branch(
    ms: &MasterState,
    g: &TimeExpandedGraph,
    inst: &Instance,
    cfg: &CgConfig,
) -> Result<IntegerResult, SolveError> {
    const INT_TOL: f64 = 1e-6;
    let start = Instant::now();
    let engine = RevisedSimplex::default();
    let cols = ms.columns();
    let n = ms.passenger_count();

    let mut best: Vec<usize> = (0..n).map(|p| ms.columns_of(p)[0]).collect();
    let mut best_cost: f64 = best.iter().map(|&k| cols[k].cost).sum();
    let mut nodes = 0;
    let mut status = BranchStatus::Optimal;
    let mut stack: Vec<Vec<bool>> = vec![vec![true; cols.len()]];

    while let Some(keep) = stack.pop() {
        if nodes >= cfg.node_limit {
            status = BranchStatus::NodeLimit;
            break;
        }
        if cfg.time_limit.is_some_and(|t| start.elapsed() >= t) {
            status = BranchStatus::TimeLimit;
            break;
        }
        nodes += 1;
        let (lp, map) = ms.restricted_lp(&keep);
        let sol = engine.solve(&lp, None).map_err(MasterError::from)?;
        if sol.status != LpStatus::Optimal || sol.objective >= best_cost - 1e-9 {
            continue;
        }
        let frac = sol
            .x
            .iter()
            .enumerate()
            .filter(|(_, x)| **x > INT_TOL && **x < 1.0 - INT_TOL)
            .min_by(|a, b| (a.1 - 0.5).abs().total_cmp(&(b.1 - 0.5).abs()).then(a.0.cmp(&b.0)));
        match frac {
            None => {
                let mut choice = vec![usize::MAX; n];
                for (j, &x) in sol.x.iter().enumerate() {
                    if x > 0.5 {
                        choice[cols[map[j]].passenger] = map[j];
                    }
                }
                debug_assert!(choice.iter().all(|&c| c != usize::MAX));
                best_cost = choice.iter().map(|&k| cols[k].cost).sum();
                best = choice;
            }
            Some((j, _)) => {
                let k = map[j];
                let mut zero = keep.clone();
                zero[k] = false;
                let mut one = keep;
                for &s in ms.columns_of(cols[k].passenger) {
                    if s != k {
                        one[s] = false;
                    }
                }
                stack.push(zero);
                stack.push(one);
            }
        }
    }

    let paths: Vec<SolutionPath> = best
        .iter()
        .map(|&k| match cols[k].to_path(g) {
            Some(path) => reconstruct_solution_path(g, &path, inst),
            None => SolutionPath::unserved(g.passenger_id(cols[k].passenger).clone(), cols[k].cost),
        })
        .collect();
    let bound = ms.objective().unwrap_or(0.0);
    let solution = Solution::new(paths, bound);
    let gap = solution.gap;
    Ok(IntegerResult { solution, chosen: best, bound, gap, nodes, status })
}
