#![allow(dead_code)]

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::Rng;
use transit_cg::graph::{TimeExpandedGraph, VertexId, VertexKind};
use transit_cg::master::DualSnapshot;
use transit_cg::pricing::{price_dijkstra, AStarPricer, PricingEngine, PricingResult, ReducedCostView};
use transit_cg::simplex::{Basis, LinearProgram, LpEngine, LpError, LpSolution, Relation, RevisedSimplex};

/// Small LP with integer data kept alongside for exact checking.
pub struct SmallLp {
    pub lp: LinearProgram,
    pub a: Vec<Vec<i64>>,
    pub rel: Vec<Relation>,
    pub b: Vec<i64>,
    pub c: Vec<i64>,
}

/// Random LP with 2 to 4 variables and up to 4 random rows, plus a bounding
/// row `sum x <= 10`.
pub fn random_small_lp(rng: &mut impl Rng) -> SmallLp {
    let n = rng.gen_range(2..=4);
    let m = rng.gen_range(1..=4);
    let mut a = Vec::new();
    let mut rel = Vec::new();
    let mut b = Vec::new();
    for _ in 0..m {
        a.push((0..n).map(|_| rng.gen_range(-3..=3)).collect::<Vec<i64>>());
        rel.push(if rng.gen_bool(0.3) { Relation::Eq } else { Relation::Le });
        b.push(rng.gen_range(-2..=8));
    }
    a.push(vec![1; n]);
    rel.push(Relation::Le);
    b.push(10);
    let c: Vec<i64> = (0..n).map(|_| rng.gen_range(-5..=5)).collect();
    let mut lp = LinearProgram::new();
    for &cj in &c {
        lp.add_variable(cj as f64);
    }
    for i in 0..a.len() {
        let coeffs: Vec<(usize, f64)> = a[i].iter().enumerate().map(|(j, &v)| (j, v as f64)).collect();
        lp.add_row(&coeffs, rel[i], b[i] as f64);
    }
    SmallLp { lp, a, rel, b, c }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Exact {
    Optimal(BigRational),
    Infeasible,
}

fn q(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Solves `m x = rhs` exactly; `None` when singular.
fn solve_exact(mut m: Vec<Vec<BigRational>>, mut rhs: Vec<BigRational>) -> Option<Vec<BigRational>> {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        rhs.swap(col, piv);
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = &m[r][col] / &m[col][col];
                for c in col..n {
                    let t = &f * &m[col][c];
                    m[r][c] -= t;
                }
                let t = &f * &rhs[col];
                rhs[r] -= t;
            }
        }
    }
    Some((0..n).map(|i| &rhs[i] / &m[i][i]).collect())
}

fn rank(mut m: Vec<Vec<BigRational>>) -> usize {
    let (rows, cols) = (m.len(), m.first().map_or(0, |r| r.len()));
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = &m[i][c] / &m[r][c];
                for k in c..cols {
                    let t = &f * &m[r][k];
                    m[i][k] -= t;
                }
            }
        }
        r += 1;
    }
    r
}

fn subsets(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if cur.len() == k {
        out.push(cur.clone());
        return;
    }
    for i in start..n {
        cur.push(i);
        subsets(n, k, i + 1, cur, out);
        cur.pop();
    }
}

/// Exact optimum by enumerating basic solutions of the standard form. `None`
/// when the rows are linearly dependent.
pub fn vertex_enumeration(lp: &SmallLp) -> Option<Exact> {
    let m = lp.a.len();
    let n = lp.c.len();
    let slacks: Vec<usize> = (0..m).filter(|&i| lp.rel[i] == Relation::Le).collect();
    let total = n + slacks.len();
    let mut mat = vec![vec![q(0); total]; m];
    for i in 0..m {
        for j in 0..n {
            mat[i][j] = q(lp.a[i][j]);
        }
    }
    for (k, &i) in slacks.iter().enumerate() {
        mat[i][n + k] = q(1);
    }
    if rank(mat.clone()) < m {
        return None;
    }
    let rhs: Vec<BigRational> = lp.b.iter().map(|&v| q(v)).collect();
    let mut all = Vec::new();
    subsets(total, m, 0, &mut Vec::new(), &mut all);
    let mut best: Option<BigRational> = None;
    for basis in all {
        let sub: Vec<Vec<BigRational>> = (0..m).map(|i| basis.iter().map(|&j| mat[i][j].clone()).collect()).collect();
        let Some(z) = solve_exact(sub, rhs.clone()) else { continue };
        if z.iter().any(|v| v.is_negative()) {
            continue;
        }
        let obj = basis
            .iter()
            .zip(&z)
            .filter(|(&j, _)| j < n)
            .fold(q(0), |acc, (&j, v)| acc + q(lp.c[j]) * v);
        if best.as_ref().map_or(true, |b| obj < *b) {
            best = Some(obj);
        }
    }
    Some(best.map_or(Exact::Infeasible, Exact::Optimal))
}

pub fn to_f64(v: &BigRational) -> f64 {
    let num: f64 = v.numer().to_string().parse().unwrap();
    let den: f64 = v.denom().to_string().parse().unwrap();
    num / den
}

/// One record per pricing call: objectives and expansion counts of both searches.
#[derive(Debug, Clone, Copy)]
pub struct PricingPair {
    pub astar: f64,
    pub dijkstra: f64,
    pub astar_expanded: usize,
    pub dijkstra_expanded: usize,
}

/// Runs A* and Dijkstra on every call and returns the result of the chosen one.
pub struct ComparingPricer {
    pub astar: AStarPricer,
    pub use_astar: bool,
    pub log: Mutex<Vec<PricingPair>>,
}

impl ComparingPricer {
    pub fn new(g: &TimeExpandedGraph, use_astar: bool) -> Self {
        Self { astar: AStarPricer::new(g), use_astar, log: Mutex::new(Vec::new()) }
    }

    pub fn take(&self) -> Vec<PricingPair> {
        std::mem::take(&mut *self.log.lock().unwrap())
    }
}

impl PricingEngine for ComparingPricer {
    fn price(&self, g: &TimeExpandedGraph, duals: &DualSnapshot, p: usize, penalty: f64) -> PricingResult {
        let a = self.astar.price(g, duals, p, penalty);
        let d = price_dijkstra(g, duals, p, penalty);
        self.log.lock().unwrap().push(PricingPair {
            astar: a.objective,
            dijkstra: d.objective,
            astar_expanded: a.expanded,
            dijkstra_expanded: d.expanded,
        });
        if self.use_astar {
            a
        } else {
            d
        }
    }
}

/// Per-solve checks of the master LP: the sign of `<=` row duals, the gap
/// between primal and dual objective, and the worst dual infeasibility.
#[derive(Debug, Clone, Copy)]
pub struct LpCheck {
    pub max_le_dual: f64,
    pub duality_gap: f64,
    pub dual_infeasibility: f64,
}

#[derive(Default)]
pub struct CheckingLp {
    inner: RevisedSimplex,
    pub log: Mutex<Vec<LpCheck>>,
}

impl LpEngine for CheckingLp {
    fn solve(&self, lp: &LinearProgram, warm: Option<&Basis>) -> Result<LpSolution, LpError> {
        let sol = self.inner.solve(lp, warm)?;
        if sol.is_optimal() {
            let mut max_le_dual = f64::NEG_INFINITY;
            for r in 0..lp.num_rows() {
                if lp.relation(r) == Relation::Le {
                    max_le_dual = max_le_dual.max(sol.duals[r]);
                }
            }
            let duality_gap = (sol.objective - sol.dual_objective(lp)).abs();
            let mut dual_infeasibility: f64 = 0.0;
            for j in 0..lp.num_vars() {
                let d = lp.cost(j) - lp.column(j).iter().map(|&(r, a)| sol.duals[r] * a).sum::<f64>();
                dual_infeasibility = dual_infeasibility.max(-d);
            }
            self.log.lock().unwrap().push(LpCheck { max_le_dual, duality_gap, dual_infeasibility });
        }
        Ok(sol)
    }
}

/// Exact reduced-cost distance from every vertex to passenger `p`'s destination.
pub fn distances_to_destination(g: &TimeExpandedGraph, duals: &DualSnapshot, p: usize) -> Vec<f64> {
    let view = ReducedCostView { graph: g, duals };
    let mut dist = vec![f64::INFINITY; g.vertex_count()];
    let target = g.destination(p);
    dist[target.index()] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((OrdF64(0.0), target.0)));
    while let Some(Reverse((OrdF64(d), v))) = heap.pop() {
        if d > dist[v as usize] {
            continue;
        }
        for &a in g.in_arcs(VertexId(v)) {
            let from = g.arc(a).from;
            if let VertexKind::Destination { .. } = g.vertex(from) {
                continue;
            }
            let nd = d + view.cost(a);
            if nd < dist[from.index()] {
                dist[from.index()] = nd;
                heap.push(Reverse((OrdF64(nd), from.0)));
            }
        }
    }
    dist
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct OrdF64(f64);
impl Eq for OrdF64 {}
impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Random non-positive capacity duals: about half the rows get a value in [-30, 0).
pub fn random_duals(g: &TimeExpandedGraph, rng: &mut impl Rng) -> DualSnapshot {
    let w = (0..g.capacitated_arcs().len())
        .map(|_| if rng.gen_bool(0.5) { -rng.gen_range(0.0..30.0) } else { 0.0 })
        .collect();
    DualSnapshot { w, alpha: vec![0.0; g.passenger_count()] }
}
