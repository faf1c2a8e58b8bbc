//! Restricted master problem over a pool of path columns.
//!
//! Row layout: one `<=` row per finite-capacity arc (in `capacity_row` order),
//! followed by one convexity row per passenger. Column `k` of the pool is LP
//! variable `k`.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{ArcId, Capacity, GraphPath, TimeExpandedGraph, VertexKind};
use crate::model::{Instance, PassengerId};
use crate::simplex::{Basis, LinearProgram, LpEngine, LpError, LpSolution, LpStatus, Relation, RevisedSimplex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnOrigin {
    Dummy,
    Generated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub passenger: usize,
    /// Arcs of the path, in order. Empty for dummies.
    pub arcs: Vec<ArcId>,
    /// Capacity rows touched by the path.
    pub cap_rows: Vec<usize>,
    pub cost: f64,
    pub origin: ColumnOrigin,
}

impl Column {
    pub fn is_dummy(&self) -> bool {
        self.origin == ColumnOrigin::Dummy
    }

    pub fn to_path(&self, g: &TimeExpandedGraph) -> Option<GraphPath> {
        (!self.is_dummy()).then(|| GraphPath::from_arcs(g, self.passenger, self.arcs.clone()))
    }
}

/// Duals of one master solve. `w` is indexed by capacity row and clamped to be
/// non-positive; `alpha` is indexed by passenger.
#[derive(Debug, Clone, PartialEq)]
pub struct DualSnapshot {
    pub w: Vec<f64>,
    pub alpha: Vec<f64>,
}

impl DualSnapshot {
    /// Dual of arc `a`; zero for arcs without a capacity row.
    pub fn arc_dual(&self, g: &TimeExpandedGraph, a: ArcId) -> f64 {
        g.capacity_row(a).map_or(0.0, |r| self.w[r])
    }

    /// Componentwise comparison within `tol`.
    pub fn same_as(&self, other: &DualSnapshot, tol: f64) -> bool {
        let close = |a: &[f64], b: &[f64]| a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol);
        close(&self.w, &other.w) && close(&self.alpha, &other.alpha)
    }
}

#[derive(Debug, Error)]
pub enum MasterError {
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("Error: RMP infeasible")]
    Infeasible,
    #[error("master LP stopped with status {0:?}")]
    Status(LpStatus),
    #[error(transparent)]
    Lp(#[from] LpError),
}

pub struct MasterState {
    columns: Vec<Column>,
    lp: LinearProgram,
    cap_rows: usize,
    passengers: usize,
    penalty: f64,
    by_passenger: Vec<Vec<usize>>,
    index: HashMap<(usize, Vec<ArcId>), usize>,
    solution: Option<LpSolution>,
    duals: Option<DualSnapshot>,
    basis: Option<Basis>,
}

/// One dummy column per passenger at the penalty cost, and a capacity row for
/// every finite-capacity arc.
pub fn init_master(g: &TimeExpandedGraph, inst: &Instance) -> MasterState {
    let mut lp = LinearProgram::new();
    let caps = g.capacitated_arcs();
    for &a in caps {
        let Capacity::Finite(k) = g.arc(a).capacity else { unreachable!("capacitated arc without capacity") };
        lp.add_row(&[], Relation::Le, k as f64);
    }
    let passengers = g.passenger_count();
    for _ in 0..passengers {
        lp.add_row(&[], Relation::Eq, 1.0);
    }
    let penalty = inst.params.penalty;
    let mut ms = MasterState {
        columns: Vec::new(),
        lp,
        cap_rows: caps.len(),
        passengers,
        penalty,
        by_passenger: vec![Vec::new(); passengers],
        index: HashMap::new(),
        solution: None,
        duals: None,
        basis: None,
    };
    for p in 0..passengers {
        ms.push(Column { passenger: p, arcs: Vec::new(), cap_rows: Vec::new(), cost: penalty, origin: ColumnOrigin::Dummy });
    }
    ms
}

impl MasterState {
    fn push(&mut self, col: Column) -> usize {
        let mut entries: Vec<(usize, f64)> = col.cap_rows.iter().map(|&r| (r, 1.0)).collect();
        entries.push((self.cap_rows + col.passenger, 1.0));
        let id = self.lp.add_column(col.cost, &entries);
        debug_assert_eq!(id, self.columns.len());
        self.by_passenger[col.passenger].push(id);
        if !col.is_dummy() {
            self.index.insert((col.passenger, col.arcs.clone()), id);
        }
        self.columns.push(col);
        id
    }

    /// Adds a generated path column, or returns the id of an identical column
    /// already in the pool. The boolean is true when the column is new.
    pub fn add_path_column(&mut self, g: &TimeExpandedGraph, p: usize, path: &GraphPath) -> Result<(usize, bool), MasterError> {
        if path.passenger != p || p >= self.passengers {
            return Err(MasterError::Contract(format!(
                "path of passenger {} offered for passenger {p}",
                path.passenger
            )));
        }
        if let Some(&id) = self.index.get(&(p, path.arcs.clone())) {
            return Ok((id, false));
        }
        let mut at = g.origin(p);
        let mut cost = 0;
        let mut cap_rows = Vec::new();
        for &a in &path.arcs {
            let arc = g.arc(a);
            if arc.from != at {
                return Err(MasterError::Contract(format!("arc {} does not continue the path", a.index())));
            }
            cost += arc.cost;
            at = arc.to;
            if let Some(r) = g.capacity_row(a) {
                cap_rows.push(r);
            }
        }
        if at != g.destination(p) || !matches!(g.vertex(at), VertexKind::Destination { .. }) {
            return Err(MasterError::Contract("path does not end at the passenger's destination".into()));
        }
        if cost != path.cost {
            return Err(MasterError::Contract(format!("path cost {} differs from arc sum {cost}", path.cost)));
        }
        let id = self.push(Column {
            passenger: p,
            arcs: path.arcs.clone(),
            cap_rows,
            cost: cost as f64,
            origin: ColumnOrigin::Generated,
        });
        Ok((id, true))
    }

    /// Solves the current LP (warm-started from the previous basis) and records the duals.
    pub fn solve(&mut self) -> Result<(f64, DualSnapshot), MasterError> {
        self.solve_with(&RevisedSimplex::default())
    }

    pub fn solve_with(&mut self, engine: &dyn LpEngine) -> Result<(f64, DualSnapshot), MasterError> {
        let sol = engine.solve(&self.lp, self.basis.as_ref())?;
        match sol.status {
            LpStatus::Optimal => {}
            LpStatus::Infeasible => return Err(MasterError::Infeasible),
            s => return Err(MasterError::Status(s)),
        }
        let w = sol.duals[..self.cap_rows].iter().map(|&y| y.min(0.0)).collect();
        let alpha = sol.duals[self.cap_rows..].to_vec();
        let snap = DualSnapshot { w, alpha };
        let obj = sol.objective;
        self.basis = sol.basis.clone();
        self.duals = Some(snap.clone());
        self.solution = Some(sol);
        Ok((obj, snap))
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, id: usize) -> &Column {
        &self.columns[id]
    }

    pub fn columns_of(&self, p: usize) -> &[usize] {
        &self.by_passenger[p]
    }

    pub fn passenger_count(&self) -> usize {
        self.passengers
    }

    pub fn capacity_row_count(&self) -> usize {
        self.cap_rows
    }

    pub fn penalty(&self) -> f64 {
        self.penalty
    }

    pub fn lp(&self) -> &LinearProgram {
        &self.lp
    }

    pub fn last_solution(&self) -> Option<&LpSolution> {
        self.solution.as_ref()
    }

    pub fn duals(&self) -> Option<&DualSnapshot> {
        self.duals.as_ref()
    }

    pub fn objective(&self) -> Option<f64> {
        self.solution.as_ref().map(|s| s.objective)
    }

    /// The master LP restricted to the columns with `keep[k]`. Returns the LP
    /// and, per LP variable, the pool column id.
    pub fn restricted_lp(&self, keep: &[bool]) -> (LinearProgram, Vec<usize>) {
        let mut lp = LinearProgram::new();
        for r in 0..self.lp.num_rows() {
            lp.add_row(&[], self.lp.relation(r), self.lp.rhs(r));
        }
        let mut map = Vec::new();
        for (k, _) in self.columns.iter().enumerate().filter(|(k, _)| keep[*k]) {
            lp.add_column(self.lp.cost(k), self.lp.column(k));
            map.push(k);
        }
        (lp, map)
    }

    /// Largest violation of a capacity or convexity row by the current LP point.
    pub fn row_violation(&self) -> f64 {
        let Some(sol) = &self.solution else { return 0.0 };
        let mut activity = vec![0.0; self.lp.num_rows()];
        for (k, x) in sol.x.iter().enumerate() {
            for &(r, a) in self.lp.column(k) {
                activity[r] += a * x;
            }
        }
        (0..self.lp.num_rows())
            .map(|r| match self.lp.relation(r) {
                Relation::Le => (activity[r] - self.lp.rhs(r)).max(0.0),
                Relation::Eq => (activity[r] - self.lp.rhs(r)).abs(),
            })
            .fold(0.0, f64::max)
    }
}

/// Per passenger: the columns carrying positive weight in the LP optimum.
#[derive(Debug, Clone, Serialize)]
pub struct FractionalAssignment {
    pub passenger: PassengerId,
    pub columns: Vec<(usize, f64)>,
    /// The dummy carries weight, i.e. the passenger is (partly) unserved.
    pub unserved: bool,
    pub cost: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FractionalSolution {
    pub assignments: Vec<FractionalAssignment>,
    pub objective: f64,
}

pub fn extract_solution(ms: &MasterState, g: &TimeExpandedGraph) -> Option<FractionalSolution> {
    const TOL: f64 = 1e-9;
    let sol = ms.last_solution()?;
    let assignments = (0..ms.passenger_count())
        .map(|p| {
            let columns: Vec<(usize, f64)> =
                ms.columns_of(p).iter().map(|&k| (k, sol.x[k])).filter(|&(_, x)| x > TOL).collect();
            let unserved = columns.iter().any(|&(k, _)| ms.column(k).is_dummy());
            let cost = columns.iter().map(|&(k, x)| x * ms.column(k).cost).sum();
            FractionalAssignment { passenger: g.passenger_id(p).clone(), columns, unserved, cost }
        })
        .collect();
    Some(FractionalSolution { assignments, objective: sol.objective })
}
