//! The partially time-expanded multilayered digraph.
//!
//! Vertices are vehicle calls `(stop, time, route)`, stop waiting nodes
//! `(stop, time)` created only at vehicle arrival times, and one origin and one
//! destination vertex per passenger. Arc costs are elapsed timesteps, so every
//! origin-to-destination path costs exactly the passenger's travel time.

use std::collections::HashMap;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::model::{Instance, Leg, PassengerId, Place, RouteId, SiteRef, SolutionPath, StopId, Timestep};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexId(pub u32);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ArcId(pub u32);

impl ArcId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Vertex payloads refer to stops, routes and passengers by their index in the instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VertexKind {
    Route { stop: usize, time: Timestep, route: usize },
    Wait { stop: usize, time: Timestep },
    Origin { passenger: usize },
    Destination { passenger: usize },
}

impl VertexKind {
    pub fn stop(&self) -> Option<usize> {
        match *self {
            VertexKind::Route { stop, .. } | VertexKind::Wait { stop, .. } => Some(stop),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArcKind {
    Route,
    Waiting,
    Transit,
    Walking,
    Access,
    Egress,
}

impl fmt::Display for ArcKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ArcKind::Route => "route",
            ArcKind::Waiting => "waiting",
            ArcKind::Transit => "transit",
            ArcKind::Walking => "walking",
            ArcKind::Access => "access",
            ArcKind::Egress => "egress",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Capacity {
    Finite(u32),
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Arc {
    pub from: VertexId,
    pub to: VertexId,
    pub cost: Timestep,
    pub capacity: Capacity,
    pub kind: ArcKind,
}

#[derive(Debug, Clone, Default)]
pub struct BuildOptions {
    /// Connect walking arcs to every reachable waiting node of the target stop
    /// instead of only the earliest one. Produces a larger, distance-equivalent graph.
    pub all_walking_targets: bool,
}

#[derive(Debug, Clone)]
pub struct TimeExpandedGraph {
    vertices: Vec<VertexKind>,
    arcs: Vec<Arc>,
    out_start: Vec<usize>,
    out_arcs: Vec<ArcId>,
    in_start: Vec<usize>,
    in_arcs: Vec<ArcId>,
    origins: Vec<VertexId>,
    destinations: Vec<VertexId>,
    departs: Vec<Timestep>,
    max_travel: Timestep,
    capacitated: Vec<ArcId>,
    capacity_row: Vec<Option<u32>>,
    stop_ids: Vec<StopId>,
    route_ids: Vec<RouteId>,
    passenger_ids: Vec<PassengerId>,
}

/// An origin-to-destination path of one passenger.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GraphPath {
    pub passenger: usize,
    pub vertices: Vec<VertexId>,
    pub arcs: Vec<ArcId>,
    pub cost: Timestep,
}

impl GraphPath {
    /// Builds a path from a connected arc sequence.
    pub fn from_arcs(g: &TimeExpandedGraph, passenger: usize, arcs: Vec<ArcId>) -> Self {
        let mut vertices = Vec::with_capacity(arcs.len() + 1);
        vertices.push(g.origin(passenger));
        let mut cost = 0;
        for &a in &arcs {
            let arc = g.arc(a);
            debug_assert_eq!(arc.from, *vertices.last().unwrap());
            vertices.push(arc.to);
            cost += arc.cost;
        }
        Self { passenger, vertices, arcs, cost }
    }
}

#[derive(Debug, Clone)]
pub struct PathEnumeration {
    pub paths: Vec<GraphPath>,
    /// The search stopped at the limit; more paths may exist.
    pub truncated: bool,
}

struct Builder {
    vertices: Vec<VertexKind>,
    arcs: Vec<Arc>,
}

impl Builder {
    fn vertex(&mut self, kind: VertexKind) -> VertexId {
        self.vertices.push(kind);
        VertexId((self.vertices.len() - 1) as u32)
    }

    fn arc(&mut self, from: VertexId, to: VertexId, cost: Timestep, capacity: Capacity, kind: ArcKind) {
        debug_assert!(cost >= 0);
        self.arcs.push(Arc { from, to, cost, capacity, kind });
    }
}

fn csr(n: usize, arcs: &[Arc], key: impl Fn(&Arc) -> VertexId) -> (Vec<usize>, Vec<ArcId>) {
    let mut start = vec![0usize; n + 1];
    for a in arcs {
        start[key(a).index() + 1] += 1;
    }
    for i in 0..n {
        start[i + 1] += start[i];
    }
    let mut fill = start.clone();
    let mut list = vec![ArcId(0); arcs.len()];
    for (i, a) in arcs.iter().enumerate() {
        let v = key(a).index();
        list[fill[v]] = ArcId(i as u32);
        fill[v] += 1;
    }
    (start, list)
}

/// Builds the graph with earliest-target walking arcs.
pub fn build_graph(inst: &Instance) -> TimeExpandedGraph {
    build_graph_with(inst, &BuildOptions::default())
}

pub fn build_graph_with(inst: &Instance, opts: &BuildOptions) -> TimeExpandedGraph {
    let params = &inst.params;
    let stop_index = inst.stop_index();
    let mut b = Builder { vertices: Vec::new(), arcs: Vec::new() };

    // route layers
    let mut route_nodes: Vec<Vec<VertexId>> = Vec::with_capacity(inst.routes.len());
    for (ri, r) in inst.routes.iter().enumerate() {
        let nodes = r
            .visits
            .iter()
            .map(|v| b.vertex(VertexKind::Route { stop: stop_index[&v.stop], time: v.arrival, route: ri }))
            .collect();
        route_nodes.push(nodes);
    }

    // waiting layers, one node per distinct arrival time
    let mut arrival_times: Vec<Vec<Timestep>> = vec![Vec::new(); inst.stops.len()];
    for r in &inst.routes {
        for v in &r.visits {
            arrival_times[stop_index[&v.stop]].push(v.arrival);
        }
    }
    let mut wait_nodes: Vec<Vec<(Timestep, VertexId)>> = Vec::with_capacity(inst.stops.len());
    for (s, times) in arrival_times.iter_mut().enumerate() {
        times.sort_unstable();
        times.dedup();
        wait_nodes.push(times.iter().map(|&t| (t, b.vertex(VertexKind::Wait { stop: s, time: t }))).collect());
    }
    let wait_at = |s: usize, t: Timestep| -> VertexId {
        let layer = &wait_nodes[s];
        layer[layer.binary_search_by_key(&t, |&(time, _)| time).expect("waiting node exists")].1
    };

    for (ri, r) in inst.routes.iter().enumerate() {
        let nodes = &route_nodes[ri];
        for k in 1..nodes.len() {
            let cost = r.visits[k].arrival - r.visits[k - 1].arrival;
            b.arc(nodes[k - 1], nodes[k], cost, Capacity::Finite(r.capacity), ArcKind::Route);
        }
    }
    for layer in &wait_nodes {
        for w in layer.windows(2) {
            b.arc(w[0].1, w[1].1, w[1].0 - w[0].0, Capacity::Unbounded, ArcKind::Waiting);
        }
    }
    for (ri, r) in inst.routes.iter().enumerate() {
        for (k, v) in r.visits.iter().enumerate() {
            let wait = wait_at(stop_index[&v.stop], v.arrival);
            b.arc(route_nodes[ri][k], wait, 0, Capacity::Unbounded, ArcKind::Transit);
            b.arc(wait, route_nodes[ri][k], 0, Capacity::Unbounded, ArcKind::Transit);
        }
    }

    // walking between distinct stops
    for s in 0..inst.stops.len() {
        for s2 in 0..inst.stops.len() {
            if s == s2 || wait_nodes[s].is_empty() || wait_nodes[s2].is_empty() {
                continue;
            }
            let d = inst.distance(SiteRef::Stop(s), SiteRef::Stop(s2));
            if !(d <= params.max_walk) {
                continue;
            }
            let walk = params.walk_time(d);
            let targets = &wait_nodes[s2];
            for &(t, from) in &wait_nodes[s] {
                let first = targets.partition_point(|&(t2, _)| t2 < t + walk);
                let last = if opts.all_walking_targets { targets.len() } else { (first + 1).min(targets.len()) };
                for &(t2, to) in &targets[first..last] {
                    b.arc(from, to, t2 - t, Capacity::Unbounded, ArcKind::Walking);
                }
            }
        }
    }

    // passenger endpoints
    let mut origins = Vec::with_capacity(inst.requests.len());
    let mut destinations = Vec::with_capacity(inst.requests.len());
    for (p, req) in inst.requests.iter().enumerate() {
        let o = b.vertex(VertexKind::Origin { passenger: p });
        let d = b.vertex(VertexKind::Destination { passenger: p });
        origins.push(o);
        destinations.push(d);
        let depart = req.depart;
        for (s, layer) in wait_nodes.iter().enumerate() {
            let dist = inst.distance(SiteRef::Origin(p), SiteRef::Stop(s));
            if !(dist <= params.max_access) {
                continue;
            }
            let walk = params.walk_time(dist);
            for &(t, v) in layer {
                if depart + walk <= t && t <= depart + params.max_wait {
                    b.arc(o, v, t - depart, Capacity::Unbounded, ArcKind::Access);
                }
            }
        }
        for (s, layer) in wait_nodes.iter().enumerate() {
            let dist = inst.distance(SiteRef::Stop(s), SiteRef::Destination(p));
            if !(dist <= params.max_egress) {
                continue;
            }
            let walk = params.walk_time(dist);
            for &(t, v) in layer {
                if depart <= t + walk && t + walk <= depart + params.max_travel {
                    b.arc(v, d, walk, Capacity::Unbounded, ArcKind::Egress);
                }
            }
        }
    }

    let Builder { vertices, arcs } = b;
    let n = vertices.len();
    let (out_start, out_arcs) = csr(n, &arcs, |a| a.from);
    let (in_start, in_arcs) = csr(n, &arcs, |a| a.to);
    let mut capacitated = Vec::new();
    let mut capacity_row = vec![None; arcs.len()];
    for (i, a) in arcs.iter().enumerate() {
        if let Capacity::Finite(_) = a.capacity {
            capacity_row[i] = Some(capacitated.len() as u32);
            capacitated.push(ArcId(i as u32));
        }
    }

    TimeExpandedGraph {
        vertices,
        arcs,
        out_start,
        out_arcs,
        in_start,
        in_arcs,
        origins,
        destinations,
        departs: inst.requests.iter().map(|r| r.depart).collect(),
        max_travel: params.max_travel,
        capacitated,
        capacity_row,
        stop_ids: inst.stops.iter().map(|s| s.id.clone()).collect(),
        route_ids: inst.routes.iter().map(|r| r.id.clone()).collect(),
        passenger_ids: inst.requests.iter().map(|r| r.passenger.clone()).collect(),
    }
}

impl TimeExpandedGraph {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn passenger_count(&self) -> usize {
        self.origins.len()
    }

    pub fn stop_count(&self) -> usize {
        self.stop_ids.len()
    }

    #[inline]
    pub fn vertex(&self, v: VertexId) -> &VertexKind {
        &self.vertices[v.index()]
    }

    #[inline]
    pub fn arc(&self, a: ArcId) -> &Arc {
        &self.arcs[a.index()]
    }

    pub fn vertices(&self) -> impl Iterator<Item = (VertexId, &VertexKind)> {
        self.vertices.iter().enumerate().map(|(i, v)| (VertexId(i as u32), v))
    }

    pub fn arcs(&self) -> impl Iterator<Item = (ArcId, &Arc)> {
        self.arcs.iter().enumerate().map(|(i, a)| (ArcId(i as u32), a))
    }

    #[inline]
    pub fn out_arcs(&self, v: VertexId) -> &[ArcId] {
        &self.out_arcs[self.out_start[v.index()]..self.out_start[v.index() + 1]]
    }

    #[inline]
    pub fn in_arcs(&self, v: VertexId) -> &[ArcId] {
        &self.in_arcs[self.in_start[v.index()]..self.in_start[v.index() + 1]]
    }

    pub fn origin(&self, passenger: usize) -> VertexId {
        self.origins[passenger]
    }

    pub fn destination(&self, passenger: usize) -> VertexId {
        self.destinations[passenger]
    }

    pub fn depart(&self, passenger: usize) -> Timestep {
        self.departs[passenger]
    }

    /// Arcs with finite capacity, in capacity-row order.
    pub fn capacitated_arcs(&self) -> &[ArcId] {
        &self.capacitated
    }

    /// Row of the arc among the capacitated arcs, if it has finite capacity.
    #[inline]
    pub fn capacity_row(&self, a: ArcId) -> Option<usize> {
        self.capacity_row[a.index()].map(|r| r as usize)
    }

    pub fn stop_id(&self, s: usize) -> &StopId {
        &self.stop_ids[s]
    }

    pub fn route_id(&self, r: usize) -> &RouteId {
        &self.route_ids[r]
    }

    pub fn passenger_id(&self, p: usize) -> &PassengerId {
        &self.passenger_ids[p]
    }

    /// Time stamp of a vertex; destinations carry the latest admissible arrival.
    pub fn time(&self, v: VertexId) -> Timestep {
        match *self.vertex(v) {
            VertexKind::Route { time, .. } | VertexKind::Wait { time, .. } => time,
            VertexKind::Origin { passenger } => self.departs[passenger],
            VertexKind::Destination { passenger } => self.departs[passenger] + self.max_travel,
        }
    }

    pub fn label(&self, v: VertexId) -> String {
        match *self.vertex(v) {
            VertexKind::Route { stop, time, route } => {
                format!("({},{},{})", self.stop_ids[stop], time, self.route_ids[route])
            }
            VertexKind::Wait { stop, time } => format!("({},{})", self.stop_ids[stop], time),
            VertexKind::Origin { passenger } => format!("(o_{},{})", self.passenger_ids[passenger], self.time(v)),
            VertexKind::Destination { passenger } => {
                format!("(d_{},{})", self.passenger_ids[passenger], self.time(v))
            }
        }
    }

    pub fn find_wait(&self, stop: &str, time: Timestep) -> Option<VertexId> {
        self.vertices().find_map(|(id, v)| match *v {
            VertexKind::Wait { stop: s, time: t } if t == time && self.stop_ids[s].as_str() == stop => Some(id),
            _ => None,
        })
    }

    pub fn find_route_node(&self, stop: &str, time: Timestep, route: &str) -> Option<VertexId> {
        self.vertices().find_map(|(id, v)| match *v {
            VertexKind::Route { stop: s, time: t, route: r }
                if t == time && self.stop_ids[s].as_str() == stop && self.route_ids[r].as_str() == route =>
            {
                Some(id)
            }
            _ => None,
        })
    }

    pub fn find_arc(&self, from: VertexId, to: VertexId) -> Option<ArcId> {
        self.out_arcs(from).iter().copied().find(|&a| self.arc(a).to == to)
    }

    /// Debug dump, one arc per line: `kind,from,to,cost,capacity`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("kind,from,to,cost,capacity\n");
        for (_, a) in self.arcs() {
            let cap = match a.capacity {
                Capacity::Finite(c) => c.to_string(),
                Capacity::Unbounded => "inf".to_owned(),
            };
            let _ = writeln!(out, "{},\"{}\",\"{}\",{},{}", a.kind, self.label(a.from), self.label(a.to), a.cost, cap);
        }
        out
    }

    fn can_reach(&self, target: VertexId) -> Vec<bool> {
        let mut seen = vec![false; self.vertex_count()];
        let mut stack = vec![target];
        seen[target.index()] = true;
        while let Some(v) = stack.pop() {
            for &a in self.in_arcs(v) {
                let u = self.arc(a).from;
                if !seen[u.index()] {
                    seen[u.index()] = true;
                    stack.push(u);
                }
            }
        }
        seen
    }
}

/// Lists simple origin-to-destination paths of `passenger`, stopping after `limit` paths.
pub fn enumerate_od_paths(g: &TimeExpandedGraph, passenger: usize, limit: usize) -> PathEnumeration {
    let origin = g.origin(passenger);
    let target = g.destination(passenger);
    let useful = g.can_reach(target);
    let mut paths = Vec::new();
    if !useful[origin.index()] {
        return PathEnumeration { paths, truncated: false };
    }
    let mut on_path = vec![false; g.vertex_count()];
    on_path[origin.index()] = true;
    // (vertex, next out-arc position)
    let mut stack: Vec<(VertexId, usize)> = vec![(origin, 0)];
    let mut arcs: Vec<ArcId> = Vec::new();
    let mut truncated = false;
    while let Some(top) = stack.last_mut() {
        let (v, pos) = *top;
        let out = g.out_arcs(v);
        if pos == out.len() {
            on_path[v.index()] = false;
            stack.pop();
            arcs.pop();
            continue;
        }
        top.1 += 1;
        let a = out[pos];
        let w = g.arc(a).to;
        if on_path[w.index()] || !useful[w.index()] {
            continue;
        }
        if w == target {
            if paths.len() == limit {
                truncated = true;
                break;
            }
            let mut p = arcs.clone();
            p.push(a);
            paths.push(GraphPath::from_arcs(g, passenger, p));
            continue;
        }
        on_path[w.index()] = true;
        arcs.push(a);
        stack.push((w, 0));
    }
    PathEnumeration { paths, truncated }
}

/// Turns a graph path into the passenger-facing leg list: transit moves collapse,
/// repeated `(stop, time)` entries merge, and the final leg carries the actual
/// arrival time at the destination.
pub fn reconstruct_solution_path(g: &TimeExpandedGraph, path: &GraphPath, _inst: &Instance) -> SolutionPath {
    let p = path.passenger;
    let depart = g.depart(p);
    let mut legs = vec![Leg::new(Place::Origin, depart)];
    let mut clock = depart;
    for (i, &a) in path.arcs.iter().enumerate() {
        let arc = g.arc(a);
        clock += arc.cost;
        let to = path.vertices[i + 1];
        match *g.vertex(to) {
            VertexKind::Route { stop, time, .. } | VertexKind::Wait { stop, time } => {
                debug_assert_eq!(time, clock);
                let ride = match (arc.kind, g.vertex(arc.from)) {
                    (ArcKind::Route, VertexKind::Route { route, .. }) => Some(g.route_id(*route).clone()),
                    _ => None,
                };
                let place = Place::Stop(g.stop_id(stop).clone());
                match legs.last_mut() {
                    Some(last) if last.place == place && last.time == time => {
                        if ride.is_some() {
                            last.route = ride;
                        }
                    }
                    _ => legs.push(Leg { place, time, route: ride }),
                }
            }
            VertexKind::Destination { .. } => legs.push(Leg::new(Place::Destination, clock)),
            VertexKind::Origin { .. } => unreachable!("origins have no incoming arcs"),
        }
    }
    let mut sp = SolutionPath::served(g.passenger_id(p).clone(), legs);
    debug_assert_eq!(sp.cost, path.cost as f64);
    sp.cost = path.cost as f64;
    sp
}

/// Arc multiset summary used by tests and diagnostics.
pub fn arc_kind_counts(g: &TimeExpandedGraph) -> HashMap<ArcKind, usize> {
    let mut m = HashMap::new();
    for (_, a) in g.arcs() {
        *m.entry(a.kind).or_insert(0) += 1;
    }
    m
}
