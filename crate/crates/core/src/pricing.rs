//! Pricing: reduced-cost shortest paths per passenger, the contracted-graph
//! lower bound used by A*, and the dual-driven passenger filter.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};
use std::fmt::Write as _;
use std::io;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::graph::{ArcId, GraphPath, TimeExpandedGraph, VertexId, VertexKind};
use crate::master::{DualSnapshot, MasterState};
use crate::model::Timestep;

/// Arc costs `c - w` under a dual snapshot.
#[derive(Clone, Copy)]
pub struct ReducedCostView<'a> {
    pub graph: &'a TimeExpandedGraph,
    pub duals: &'a DualSnapshot,
}

impl ReducedCostView<'_> {
    #[inline]
    pub fn cost(&self, a: ArcId) -> f64 {
        let w = self.graph.capacity_row(a).map_or(0.0, |r| self.duals.w[r].min(0.0));
        self.graph.arc(a).cost as f64 - w
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PricingResult {
    pub passenger: usize,
    /// Reduced cost of the best path minus the convexity dual.
    pub objective: f64,
    pub path: Option<GraphPath>,
    /// Vertices settled by the search.
    pub expanded: usize,
}

#[derive(Clone, Copy)]
struct Entry {
    f: f64,
    g: f64,
    v: u32,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Entry {}
impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Entry {
    // BinaryHeap is a max-heap: the "greatest" entry has the smallest f, then
    // the largest g, then the smallest vertex index.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .f
            .total_cmp(&self.f)
            .then_with(|| self.g.total_cmp(&other.g))
            .then_with(|| other.v.cmp(&self.v))
    }
}

fn search(g: &TimeExpandedGraph, duals: &DualSnapshot, p: usize, penalty: f64, h: impl Fn(VertexId) -> f64) -> PricingResult {
    let view = ReducedCostView { graph: g, duals };
    let n = g.vertex_count();
    let source = g.origin(p);
    let target = g.destination(p);
    let mut dist = vec![f64::INFINITY; n];
    let mut pred: Vec<Option<ArcId>> = vec![None; n];
    let mut closed = vec![false; n];
    let mut heap = BinaryHeap::new();
    let alpha = duals.alpha[p];

    dist[source.index()] = 0.0;
    heap.push(Entry { f: h(source), g: 0.0, v: source.0 });
    let mut expanded = 0;
    let mut found = false;
    while let Some(Entry { g: d, v, .. }) = heap.pop() {
        let vi = v as usize;
        if closed[vi] || d > dist[vi] {
            continue;
        }
        closed[vi] = true;
        expanded += 1;
        if vi == target.index() {
            found = true;
            break;
        }
        for &a in g.out_arcs(VertexId(v)) {
            let to = g.arc(a).to;
            let ti = to.index();
            if closed[ti] {
                continue;
            }
            if let VertexKind::Destination { passenger } = *g.vertex(to) {
                if passenger != p {
                    continue;
                }
            }
            let hv = h(to);
            if !hv.is_finite() {
                continue;
            }
            let nd = d + view.cost(a);
            if nd < dist[ti] {
                dist[ti] = nd;
                pred[ti] = Some(a);
                heap.push(Entry { f: nd + hv, g: nd, v: to.0 });
            }
        }
    }
    if !found {
        return PricingResult { passenger: p, objective: penalty - alpha, path: None, expanded };
    }
    let mut arcs = Vec::new();
    let mut at = target;
    while let Some(a) = pred[at.index()] {
        arcs.push(a);
        at = g.arc(a).from;
    }
    arcs.reverse();
    let path = GraphPath::from_arcs(g, p, arcs);
    PricingResult { passenger: p, objective: dist[target.index()] - alpha, path: Some(path), expanded }
}

/// Label-setting search from the passenger's origin; ties go to the lower vertex index.
pub fn price_dijkstra(g: &TimeExpandedGraph, duals: &DualSnapshot, p: usize, penalty: f64) -> PricingResult {
    search(g, duals, p, penalty, |_| 0.0)
}

/// A* with the contracted-graph bound; ties prefer the larger path cost, then the lower index.
pub fn price_astar(
    g: &TimeExpandedGraph,
    duals: &DualSnapshot,
    p: usize,
    penalty: f64,
    oracle: &HeuristicOracle,
) -> PricingResult {
    search(g, duals, p, penalty, |v| oracle.value(g, p, v))
}

/// Static graph over stops (indices `0..S`) and destinations (`S + p`).
#[derive(Debug, Clone)]
pub struct ContractedGraph {
    stops: usize,
    passengers: usize,
    arcs: BTreeMap<(usize, usize), Timestep>,
    into_destination: Vec<Vec<(usize, Timestep)>>,
    sigma: Vec<Timestep>,
    hash: String,
}

const UNREACHABLE: Timestep = Timestep::MAX;

impl ContractedGraph {
    pub fn stop_count(&self) -> usize {
        self.stops
    }

    pub fn destination_node(&self, p: usize) -> usize {
        self.stops + p
    }

    pub fn arc_cost(&self, from: usize, to: usize) -> Option<Timestep> {
        self.arcs.get(&(from, to)).copied()
    }

    pub fn arcs(&self) -> impl Iterator<Item = ((usize, usize), Timestep)> + '_ {
        self.arcs.iter().map(|(&k, &c)| (k, c))
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    /// Shortest stop-to-stop distance on the destination-free subgraph.
    pub fn sigma(&self, from: usize, to: usize) -> Option<Timestep> {
        let d = self.sigma[from * self.stops + to];
        (d != UNREACHABLE).then_some(d)
    }

    /// Content hash of the destination-free subgraph that keys the distance cache.
    pub fn network_hash(&self) -> &str {
        &self.hash
    }

    /// Writes the distance table: a header with the network hash, then one row per stop.
    pub fn save_sigma(&self, path: &Path) -> io::Result<()> {
        let mut out = format!("transit-cg-sigma 1\nhash {}\nstops {}\n", self.hash, self.stops);
        for i in 0..self.stops {
            let row: Vec<String> = (0..self.stops)
                .map(|j| self.sigma(i, j).map_or_else(|| "-".to_string(), |d| d.to_string()))
                .collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        std::fs::write(path, out)
    }

    /// Replaces the distance table with the cached one if its hash matches.
    fn load_sigma(&mut self, path: &Path) -> bool {
        let Ok(text) = std::fs::read_to_string(path) else { return false };
        let mut lines = text.lines();
        if lines.next() != Some("transit-cg-sigma 1") {
            return false;
        }
        if lines.next() != Some(format!("hash {}", self.hash).as_str()) {
            return false;
        }
        if lines.next() != Some(format!("stops {}", self.stops).as_str()) {
            return false;
        }
        let mut sigma = Vec::with_capacity(self.stops * self.stops);
        for line in lines.by_ref().take(self.stops) {
            for tok in line.split_whitespace() {
                match tok {
                    "-" => sigma.push(UNREACHABLE),
                    t => match t.parse() {
                        Ok(d) => sigma.push(d),
                        Err(_) => return false,
                    },
                }
            }
        }
        if sigma.len() != self.stops * self.stops {
            return false;
        }
        self.sigma = sigma;
        true
    }
}

fn contract(g: &TimeExpandedGraph) -> ContractedGraph {
    let stops = g.stop_count();
    let passengers = g.passenger_count();
    let node = |v: VertexId| match *g.vertex(v) {
        VertexKind::Route { stop, .. } | VertexKind::Wait { stop, .. } => Some(stop),
        VertexKind::Destination { passenger } => Some(stops + passenger),
        VertexKind::Origin { .. } => None,
    };
    let mut arcs: BTreeMap<(usize, usize), Timestep> = BTreeMap::new();
    for (_, a) in g.arcs() {
        let (Some(i), Some(j)) = (node(a.from), node(a.to)) else { continue };
        if i != j {
            let e = arcs.entry((i, j)).or_insert(a.cost);
            *e = (*e).min(a.cost);
        }
    }
    let mut into_destination = vec![Vec::new(); passengers];
    let mut hasher = Sha256::new();
    hasher.update(format!("{stops}\n"));
    for (&(i, j), &c) in &arcs {
        if j >= stops {
            into_destination[j - stops].push((i, c));
        } else {
            hasher.update(format!("{i} {j} {c}\n"));
        }
    }
    let hash = hasher.finalize().iter().map(|b| format!("{b:02x}")).collect();
    ContractedGraph { stops, passengers, arcs, into_destination, sigma: Vec::new(), hash }
}

impl ContractedGraph {
    /// All-pairs Dijkstra over the stop-to-stop arcs.
    fn compute_sigma(&mut self) {
        use std::cmp::Reverse;
        let n = self.stops;
        let mut adj = vec![Vec::new(); n];
        for (&(i, j), &c) in &self.arcs {
            if j < n {
                adj[i].push((j, c));
            }
        }
        let mut sigma = vec![UNREACHABLE; n * n];
        for s in 0..n {
            let row = &mut sigma[s * n..(s + 1) * n];
            let mut heap = BinaryHeap::new();
            row[s] = 0;
            heap.push(Reverse((0, s)));
            while let Some(Reverse((d, v))) = heap.pop() {
                if d > row[v] {
                    continue;
                }
                for &(w, c) in &adj[v] {
                    let nd = d + c;
                    if nd < row[w] {
                        row[w] = nd;
                        heap.push(Reverse((nd, w)));
                    }
                }
            }
        }
        self.sigma = sigma;
    }
}

/// Contracts the graph and computes all-pairs stop distances.
pub fn build_contracted_graph(g: &TimeExpandedGraph) -> ContractedGraph {
    let mut h = contract(g);
    h.compute_sigma();
    h
}

/// As [`build_contracted_graph`], reusing the distance table stored at `cache`
/// when its network hash matches and rewriting the file otherwise. The flag
/// reports a cache hit.
pub fn build_contracted_graph_cached(g: &TimeExpandedGraph, cache: &Path) -> io::Result<(ContractedGraph, bool)> {
    let mut h = contract(g);
    if h.load_sigma(cache) {
        return Ok((h, true));
    }
    h.compute_sigma();
    h.save_sigma(cache)?;
    Ok((h, false))
}

/// Lower bound on the remaining distance to passenger `p`'s destination, per stop.
pub fn compute_heuristic(h: &ContractedGraph, p: usize) -> Vec<f64> {
    (0..h.stops)
        .map(|i| {
            h.into_destination[p]
                .iter()
                .filter_map(|&(q, c)| h.sigma(i, q).map(|s| s + c))
                .min()
                .map_or(f64::INFINITY, |d| d as f64)
        })
        .collect()
}

/// Per-passenger heuristic tables, built once and reused across iterations.
#[derive(Debug, Clone)]
pub struct HeuristicOracle {
    stops: usize,
    table: Vec<f64>,
}

impl HeuristicOracle {
    pub fn build(h: &ContractedGraph) -> Self {
        let mut table = Vec::with_capacity(h.passengers * h.stops);
        for p in 0..h.passengers {
            table.extend(compute_heuristic(h, p));
        }
        Self { stops: h.stops, table }
    }

    /// A zero bound everywhere except other passengers' destinations.
    pub fn zero(g: &TimeExpandedGraph) -> Self {
        Self { stops: g.stop_count(), table: vec![0.0; g.stop_count() * g.passenger_count()] }
    }

    pub fn stop_value(&self, p: usize, stop: usize) -> f64 {
        self.table[p * self.stops + stop]
    }

    /// Bound for vertex `v` of the time-expanded graph.
    pub fn value(&self, g: &TimeExpandedGraph, p: usize, v: VertexId) -> f64 {
        match *g.vertex(v) {
            VertexKind::Route { stop, .. } | VertexKind::Wait { stop, .. } => self.stop_value(p, stop),
            VertexKind::Destination { passenger } if passenger == p => 0.0,
            VertexKind::Destination { .. } => f64::INFINITY,
            VertexKind::Origin { .. } => 0.0,
        }
    }
}

/// Passengers with a pooled column over an arc whose capacity dual is negative.
pub fn pricing_filter(ms: &MasterState, duals: &DualSnapshot, tol: f64) -> Vec<usize> {
    let mut hit = vec![false; ms.passenger_count()];
    for col in ms.columns() {
        if !hit[col.passenger] && col.cap_rows.iter().any(|&r| duals.w[r] < -tol) {
            hit[col.passenger] = true;
        }
    }
    (0..hit.len()).filter(|&p| hit[p]).collect()
}

/// Seam between the column generation driver and a pricing algorithm.
pub trait PricingEngine: Sync {
    fn price(&self, g: &TimeExpandedGraph, duals: &DualSnapshot, p: usize, penalty: f64) -> PricingResult;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct DijkstraPricer;

impl PricingEngine for DijkstraPricer {
    fn price(&self, g: &TimeExpandedGraph, duals: &DualSnapshot, p: usize, penalty: f64) -> PricingResult {
        price_dijkstra(g, duals, p, penalty)
    }
}

#[derive(Debug, Clone)]
pub struct AStarPricer {
    pub oracle: HeuristicOracle,
}

impl AStarPricer {
    pub fn new(g: &TimeExpandedGraph) -> Self {
        Self { oracle: HeuristicOracle::build(&build_contracted_graph(g)) }
    }
}

impl PricingEngine for AStarPricer {
    fn price(&self, g: &TimeExpandedGraph, duals: &DualSnapshot, p: usize, penalty: f64) -> PricingResult {
        price_astar(g, duals, p, penalty, &self.oracle)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{contention_instance, three_stop_example};
    use crate::graph::{build_graph, enumerate_od_paths};
    use crate::master::init_master;

    fn zero_duals(g: &TimeExpandedGraph, alpha: f64) -> DualSnapshot {
        DualSnapshot { w: vec![0.0; g.capacitated_arcs().len()], alpha: vec![alpha; g.passenger_count()] }
    }

    fn example() -> (TimeExpandedGraph, HeuristicOracle) {
        let g = build_graph(&three_stop_example());
        let h = build_contracted_graph(&g);
        (g, HeuristicOracle::build(&h))
    }

    #[test]
    fn contracted_example() {
        let g = build_graph(&three_stop_example());
        let h = build_contracted_graph(&g);
        let d = h.destination_node(0);
        let expect = [((0, 1), 1), ((1, 2), 1), ((0, 2), 2), ((2, 0), 2), ((1, d), 1), ((2, d), 7)];
        for ((i, j), c) in expect {
            assert_eq!(h.arc_cost(i, j), Some(c), "arc {i}->{j}");
        }
        assert_eq!(h.arc_count(), expect.len());
        let heur = compute_heuristic(&h, 0);
        assert_eq!(heur, vec![2.0, 1.0, 4.0]);
    }

    #[test]
    fn contracted_edge_cases() {
        let mut inst = contention_instance();
        inst.routes.clear();
        let g = build_graph(&inst);
        let h = build_contracted_graph(&g);
        assert_eq!(h.arcs().filter(|((_, j), _)| *j < h.stop_count()).count(), 0);
        assert!(compute_heuristic(&h, 0).iter().all(|v| v.is_infinite()));

        let mut inst = contention_instance();
        inst.routes[1].visits[1].arrival = 9;
        let g = build_graph(&inst);
        let h = build_contracted_graph(&g);
        assert_eq!(h.arc_cost(0, 1), Some(2));
    }

    #[test]
    fn dijkstra_examples() {
        let (g, _) = example();
        let r = price_dijkstra(&g, &zero_duals(&g, 100.0), 0, 100.0);
        assert_eq!(r.objective, -93.0);
        assert_eq!(r.path.as_ref().unwrap().cost, 7);

        let r = price_dijkstra(&g, &zero_duals(&g, 7.0), 0, 100.0);
        assert_eq!(r.objective, 0.0);

        let ride = g
            .find_arc(g.find_route_node("s1", 5, "r1").unwrap(), g.find_route_node("s2", 6, "r1").unwrap())
            .unwrap();
        let mut duals = zero_duals(&g, 7.0);
        duals.w[g.capacity_row(ride).unwrap()] = -5.0;
        let r = price_dijkstra(&g, &duals, 0, 100.0);
        assert_eq!(r.objective, 3.0);
        assert_eq!(r.path.unwrap().cost, 10);
    }

    #[test]
    fn astar_matches_dijkstra() {
        let (g, oracle) = example();
        let ride = g
            .find_arc(g.find_route_node("s1", 5, "r1").unwrap(), g.find_route_node("s2", 6, "r1").unwrap())
            .unwrap();
        let mut shifted = zero_duals(&g, 7.0);
        shifted.w[g.capacity_row(ride).unwrap()] = -5.0;
        for duals in [zero_duals(&g, 100.0), zero_duals(&g, 7.0), shifted] {
            let d = price_dijkstra(&g, &duals, 0, 100.0);
            let a = price_astar(&g, &duals, 0, 100.0, &oracle);
            assert_eq!(a.objective, d.objective);
            assert!(a.expanded <= d.expanded);
            let z = price_astar(&g, &duals, 0, 100.0, &HeuristicOracle::zero(&g));
            assert_eq!(z, d);
        }
    }

    #[test]
    fn unreachable_destination() {
        let mut inst = contention_instance();
        inst.routes.clear();
        inst.requests[0].destination = crate::model::Coordinate::new(100.0, 100.0);
        let g = build_graph(&inst);
        let oracle = HeuristicOracle::build(&build_contracted_graph(&g));
        let duals = zero_duals(&g, 200.0);
        let d = price_dijkstra(&g, &duals, 0, 200.0);
        assert!(d.path.is_none());
        assert_eq!(d.objective, 0.0);
        let a = price_astar(&g, &duals, 0, 200.0, &oracle);
        assert!(a.path.is_none());
        assert!(a.expanded <= d.expanded);
    }

    #[test]
    fn heuristic_is_admissible_on_example_paths() {
        let (g, oracle) = example();
        for path in enumerate_od_paths(&g, 0, 10).paths {
            let mut rest = path.cost;
            for (i, &v) in path.vertices.iter().enumerate() {
                assert!(oracle.value(&g, 0, v) <= rest as f64, "{}", g.label(v));
                if i < path.arcs.len() {
                    rest -= g.arc(path.arcs[i]).cost;
                }
            }
        }
    }

    #[test]
    fn filter_scans_pool_columns() {
        let inst = contention_instance();
        let g = build_graph(&inst);
        let mut ms = init_master(&g, &inst);
        let (_, zero) = ms.solve().unwrap();
        assert!(pricing_filter(&ms, &zero, 1e-9).is_empty());

        let mut duals = zero.clone();
        duals.w[0] = -1.0;
        assert!(pricing_filter(&ms, &duals, 1e-9).is_empty());

        for p in 0..2 {
            let path = price_dijkstra(&g, &zero, p, 200.0).path.unwrap();
            ms.add_path_column(&g, p, &path).unwrap();
        }
        let (_, duals) = ms.solve().unwrap();
        assert!(duals.w.iter().any(|&w| w < 0.0));
        assert_eq!(pricing_filter(&ms, &duals, 1e-9), vec![0, 1]);
    }

    #[test]
    fn sigma_cache_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("sigma.txt");
        let g = build_graph(&three_stop_example());
        let (h1, hit) = build_contracted_graph_cached(&g, &file).unwrap();
        assert!(!hit);
        let (h2, hit) = build_contracted_graph_cached(&g, &file).unwrap();
        assert!(hit);
        assert_eq!(h1.sigma, h2.sigma);

        let g2 = build_graph(&contention_instance());
        let (h3, hit) = build_contracted_graph_cached(&g2, &file).unwrap();
        assert!(!hit);
        assert_ne!(h3.network_hash(), h1.network_hash());
        assert_eq!(h3.sigma, build_contracted_graph(&g2).sigma);
    }
}
