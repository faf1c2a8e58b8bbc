//! Reference solvers used to cross-check column generation: the arc-flow
//! multi-commodity LP and exhaustive search over path assignments.
//!
//! Neither touches the master problem code; both build their models directly
//! from the graph.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{enumerate_od_paths, ArcId, Capacity, GraphPath, TimeExpandedGraph, VertexId};
use crate::model::Instance;
use crate::simplex::{solve_lp, LinearProgram, LpError, LpStatus, Relation};

pub const DEFAULT_ARCFLOW_CAP: usize = 2_000_000;
pub const DEFAULT_COMBINATION_CAP: u128 = 10_000_000;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("arc-flow model too large: {arcs} arcs x {passengers} passengers exceeds {cap}")]
    TooLarge { arcs: usize, passengers: usize, cap: usize },
    #[error("path enumeration for passenger {passenger} hit the limit of {limit} paths")]
    Truncated { passenger: String, limit: usize },
    #[error("{combinations} path combinations exceed the cap of {cap} (options per passenger: {counts:?})")]
    TooManyCombinations { combinations: u128, cap: u128, counts: Vec<usize> },
    #[error("oracle LP ended with status {0:?}")]
    Status(LpStatus),
    #[error(transparent)]
    Lp(#[from] LpError),
}

#[derive(Debug, Clone, Serialize)]
pub struct ArcFlowResult {
    pub objective: f64,
    /// Positive arc flows per passenger.
    pub flows: Vec<Vec<(usize, f64)>>,
    /// Flow on each passenger's unserved option.
    pub unserved: Vec<f64>,
    pub variables: usize,
    pub rows: usize,
}

fn mark(g: &TimeExpandedGraph, start: VertexId, forward: bool) -> Vec<bool> {
    let mut seen = vec![false; g.vertex_count()];
    let mut stack = vec![start];
    seen[start.index()] = true;
    while let Some(v) = stack.pop() {
        let arcs = if forward { g.out_arcs(v) } else { g.in_arcs(v) };
        for &a in arcs {
            let arc = g.arc(a);
            let w = if forward { arc.to } else { arc.from };
            if !seen[w.index()] {
                seen[w.index()] = true;
                stack.push(w);
            }
        }
    }
    seen
}

pub fn solve_arcflow_lp(g: &TimeExpandedGraph, inst: &Instance) -> Result<ArcFlowResult, OracleError> {
    solve_arcflow_lp_with_cap(g, inst, DEFAULT_ARCFLOW_CAP)
}

/// LP relaxation of the arc-flow formulation. Each passenger's variables are
/// restricted to arcs on some origin-destination path, plus an unserved arc
/// from origin to destination at the penalty cost. The destination's
/// conservation row is implied by the others and omitted.
pub fn solve_arcflow_lp_with_cap(g: &TimeExpandedGraph, inst: &Instance, cap: usize) -> Result<ArcFlowResult, OracleError> {
    let (arcs, passengers) = (g.arc_count(), g.passenger_count());
    if arcs.saturating_mul(passengers) > cap {
        return Err(OracleError::TooLarge { arcs, passengers, cap });
    }
    let mut lp = LinearProgram::new();
    let mut per_passenger: Vec<(Vec<ArcId>, HashMap<VertexId, usize>)> = Vec::with_capacity(passengers);
    for p in 0..passengers {
        let (o, d) = (g.origin(p), g.destination(p));
        let fwd = mark(g, o, true);
        let bwd = mark(g, d, false);
        let live = |v: VertexId| fwd[v.index()] && bwd[v.index()];
        let used: Vec<ArcId> = g.arcs().filter(|(_, a)| live(a.from) && live(a.to)).map(|(id, _)| id).collect();
        let mut rows = HashMap::new();
        rows.insert(o, lp.add_row(&[], Relation::Eq, 1.0));
        for &a in &used {
            for v in [g.arc(a).from, g.arc(a).to] {
                if v != d && !rows.contains_key(&v) {
                    rows.insert(v, lp.add_row(&[], Relation::Eq, 0.0));
                }
            }
        }
        per_passenger.push((used, rows));
    }
    let mut cap_row: HashMap<ArcId, usize> = HashMap::new();
    for (used, _) in &per_passenger {
        for &a in used {
            if let Capacity::Finite(k) = g.arc(a).capacity {
                cap_row.entry(a).or_insert_with(|| lp.add_row(&[], Relation::Le, k as f64));
            }
        }
    }

    let mut vars: Vec<Vec<(usize, ArcId)>> = Vec::with_capacity(passengers);
    let mut unserved_vars = Vec::with_capacity(passengers);
    for (p, (used, rows)) in per_passenger.iter().enumerate() {
        let mut mine = Vec::with_capacity(used.len());
        for &a in used {
            let arc = g.arc(a);
            let mut entries = Vec::with_capacity(3);
            if let Some(&r) = rows.get(&arc.from) {
                entries.push((r, 1.0));
            }
            if let Some(&r) = rows.get(&arc.to) {
                entries.push((r, -1.0));
            }
            if let Some(&r) = cap_row.get(&a) {
                entries.push((r, 1.0));
            }
            mine.push((lp.add_column(arc.cost as f64, &entries), a));
        }
        vars.push(mine);
        unserved_vars.push(lp.add_column(inst.params.penalty, &[(rows[&g.origin(p)], 1.0)]));
    }

    let sol = solve_lp(&lp, None)?;
    if sol.status != LpStatus::Optimal {
        return Err(OracleError::Status(sol.status));
    }
    let flows = vars
        .iter()
        .map(|mine| mine.iter().filter(|(j, _)| sol.x[*j] > 1e-9).map(|&(j, a)| (a.index(), sol.x[j])).collect())
        .collect();
    let unserved = unserved_vars.iter().map(|&j| sol.x[j]).collect();
    Ok(ArcFlowResult { objective: sol.objective, flows, unserved, variables: lp.num_vars(), rows: lp.num_rows() })
}

#[derive(Debug, Clone)]
pub struct BruteForceResult {
    pub cost: f64,
    /// Chosen path per passenger; `None` means unserved.
    pub assignment: Vec<Option<GraphPath>>,
    pub combinations: u128,
}

pub fn solve_bruteforce_ip(g: &TimeExpandedGraph, inst: &Instance, path_limit: usize) -> Result<BruteForceResult, OracleError> {
    solve_bruteforce_ip_with_cap(g, inst, path_limit, DEFAULT_COMBINATION_CAP)
}

struct Choice {
    cost: f64,
    rows: Vec<usize>,
    path: Option<usize>,
}

/// Exact integral optimum over all capacity-feasible path assignments, each
/// passenger also having the unserved option at the penalty cost.
pub fn solve_bruteforce_ip_with_cap(
    g: &TimeExpandedGraph,
    inst: &Instance,
    path_limit: usize,
    cap: u128,
) -> Result<BruteForceResult, OracleError> {
    let n = g.passenger_count();
    let penalty = inst.params.penalty;
    let mut paths: Vec<Vec<GraphPath>> = Vec::with_capacity(n);
    for p in 0..n {
        let e = enumerate_od_paths(g, p, path_limit);
        if e.truncated {
            return Err(OracleError::Truncated { passenger: g.passenger_id(p).to_string(), limit: path_limit });
        }
        paths.push(e.paths);
    }
    let counts: Vec<usize> = paths.iter().map(|ps| ps.len() + 1).collect();
    let combinations = counts.iter().fold(1u128, |acc, &c| acc.saturating_mul(c as u128));
    if combinations > cap {
        return Err(OracleError::TooManyCombinations { combinations, cap, counts });
    }

    let options: Vec<Vec<Choice>> = paths
        .iter()
        .map(|ps| {
            let mut opts: Vec<Choice> = ps
                .iter()
                .enumerate()
                .map(|(i, path)| Choice {
                    cost: path.cost as f64,
                    rows: path.arcs.iter().filter_map(|&a| g.capacity_row(a)).collect(),
                    path: Some(i),
                })
                .collect();
            opts.push(Choice { cost: penalty, rows: Vec::new(), path: None });
            opts.sort_by(|a, b| a.cost.total_cmp(&b.cost));
            opts
        })
        .collect();
    let mut suffix = vec![0.0; n + 1];
    for p in (0..n).rev() {
        suffix[p] = suffix[p + 1] + options[p][0].cost;
    }
    let caps: Vec<u32> = g
        .capacitated_arcs()
        .iter()
        .map(|&a| match g.arc(a).capacity {
            Capacity::Finite(k) => k,
            Capacity::Unbounded => u32::MAX,
        })
        .collect();

    struct Search<'a> {
        options: &'a [Vec<Choice>],
        suffix: &'a [f64],
        caps: &'a [u32],
        load: Vec<u32>,
        current: Vec<usize>,
        best: Vec<usize>,
        best_cost: f64,
    }
    impl Search<'_> {
        fn go(&mut self, p: usize, cost: f64) {
            if cost + self.suffix[p] >= self.best_cost - 1e-9 {
                return;
            }
            if p == self.options.len() {
                self.best_cost = cost;
                self.best = self.current.clone();
                return;
            }
            for (i, opt) in self.options[p].iter().enumerate() {
                if opt.rows.iter().any(|&r| self.load[r] >= self.caps[r]) {
                    continue;
                }
                opt.rows.iter().for_each(|&r| self.load[r] += 1);
                self.current[p] = i;
                self.go(p + 1, cost + opt.cost);
                opt.rows.iter().for_each(|&r| self.load[r] -= 1);
            }
        }
    }

    let unserved: Vec<usize> = options.iter().map(|o| o.iter().position(|x| x.path.is_none()).unwrap()).collect();
    let mut search = Search {
        options: &options,
        suffix: &suffix,
        caps: &caps,
        load: vec![0; caps.len()],
        current: vec![0; n],
        best: unserved.clone(),
        best_cost: n as f64 * penalty + 1e-6,
    };
    search.go(0, 0.0);
    let best = search.best;
    let cost = best.iter().enumerate().map(|(p, &i)| options[p][i].cost).sum();
    let assignment = best
        .iter()
        .enumerate()
        .map(|(p, &i)| options[p][i].path.map(|k| paths[p][k].clone()))
        .collect();
    Ok(BruteForceResult { cost, assignment, combinations })
}
