//! Problem instances, solutions and per-path / per-solution feasibility checks.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Integer timestep. Non-negative in every valid instance.
pub type Timestep = i64;

macro_rules! string_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub String);

        impl $name {
            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.to_owned())
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                Self(s)
            }
        }
    };
}

string_id!(StopId);
string_id!(RouteId);
string_id!(PassengerId);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coordinate {
    pub x: f64,
    pub y: f64,
}

impl Coordinate {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Request {
    pub passenger: PassengerId,
    pub origin: Coordinate,
    pub destination: Coordinate,
    pub depart: Timestep,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stop {
    pub id: StopId,
    pub location: Coordinate,
}

/// One timetabled call of a vehicle at a stop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Visit {
    pub stop: StopId,
    pub arrival: Timestep,
}

/// A single vehicle trip: the ordered stops it calls at and its capacity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteSchedule {
    pub id: RouteId,
    pub visits: Vec<Visit>,
    pub capacity: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceMetric {
    Euclidean,
    Manhattan,
    /// Distances come from the instance's explicit [`DistanceMatrix`].
    Matrix,
}

impl std::str::FromStr for DistanceMetric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "euclidean" => Ok(Self::Euclidean),
            "manhattan" => Ok(Self::Manhattan),
            "matrix" => Ok(Self::Matrix),
            other => Err(format!("unknown distance metric `{other}`")),
        }
    }
}

impl fmt::Display for DistanceMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Euclidean => "euclidean",
            Self::Manhattan => "manhattan",
            Self::Matrix => "matrix",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    /// Walking speed in length units per timestep.
    pub walk_speed: f64,
    pub max_access: f64,
    pub max_egress: f64,
    pub max_walk: f64,
    /// Longest admissible wait between departure and the first vehicle arrival.
    pub max_wait: Timestep,
    /// Latest arrival is `depart + max_travel`.
    pub max_travel: Timestep,
    /// Cost charged for an unserved passenger.
    pub penalty: f64,
    pub metric: DistanceMetric,
}

impl Parameters {
    pub fn default_penalty(max_travel: Timestep) -> f64 {
        10.0 * max_travel as f64
    }

    /// Walking time for `distance`, rounded up to whole timesteps.
    pub fn walk_time(&self, distance: f64) -> Timestep {
        // absorb float noise such as 3.0000000000000004
        let t = (distance / self.walk_speed - 1e-9).ceil();
        t.max(0.0) as Timestep
    }
}

/// A location that can appear in an explicit distance matrix.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Site {
    Stop(StopId),
    Origin(PassengerId),
    Destination(PassengerId),
}

impl Site {
    /// Label used in distance files: stop ids verbatim, `o:<id>` and `d:<id>` for request endpoints.
    pub fn label(&self) -> String {
        match self {
            Site::Stop(s) => s.0.clone(),
            Site::Origin(p) => format!("o:{p}"),
            Site::Destination(p) => format!("d:{p}"),
        }
    }

    pub fn parse_label(label: &str) -> Self {
        if let Some(p) = label.strip_prefix("o:") {
            Site::Origin(p.into())
        } else if let Some(p) = label.strip_prefix("d:") {
            Site::Destination(p.into())
        } else {
            Site::Stop(label.into())
        }
    }
}

/// Explicit pairwise distances. Lookups are symmetric; missing pairs are infinitely far apart.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DistanceMatrix {
    entries: BTreeMap<(Site, Site), f64>,
}

impl DistanceMatrix {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, a: Site, b: Site, distance: f64) {
        self.entries.insert((a, b), distance);
    }

    pub fn get(&self, a: &Site, b: &Site) -> f64 {
        if a == b {
            return 0.0;
        }
        let key = (a.clone(), b.clone());
        if let Some(d) = self.entries.get(&key) {
            return *d;
        }
        let (a, b) = key;
        self.entries.get(&(b, a)).copied().unwrap_or(f64::INFINITY)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Site, &Site, f64)> {
        self.entries.iter().map(|((a, b), d)| (a, b, *d))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Index-based reference to a location of an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SiteRef {
    Stop(usize),
    Origin(usize),
    Destination(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub stops: Vec<Stop>,
    pub routes: Vec<RouteSchedule>,
    pub requests: Vec<Request>,
    pub params: Parameters,
    #[serde(default)]
    pub matrix: Option<DistanceMatrix>,
}

impl Instance {
    pub fn stop_index(&self) -> HashMap<&StopId, usize> {
        self.stops.iter().enumerate().map(|(i, s)| (&s.id, i)).collect()
    }

    pub fn request_index(&self, passenger: &PassengerId) -> Option<usize> {
        self.requests.iter().position(|r| &r.passenger == passenger)
    }

    fn coordinate(&self, site: SiteRef) -> Coordinate {
        match site {
            SiteRef::Stop(i) => self.stops[i].location,
            SiteRef::Origin(p) => self.requests[p].origin,
            SiteRef::Destination(p) => self.requests[p].destination,
        }
    }

    fn site(&self, site: SiteRef) -> Site {
        match site {
            SiteRef::Stop(i) => Site::Stop(self.stops[i].id.clone()),
            SiteRef::Origin(p) => Site::Origin(self.requests[p].passenger.clone()),
            SiteRef::Destination(p) => Site::Destination(self.requests[p].passenger.clone()),
        }
    }

    /// Distance under the instance's metric.
    pub fn distance(&self, a: SiteRef, b: SiteRef) -> f64 {
        match self.params.metric {
            DistanceMetric::Euclidean => {
                let (p, q) = (self.coordinate(a), self.coordinate(b));
                (p.x - q.x).hypot(p.y - q.y)
            }
            DistanceMetric::Manhattan => {
                let (p, q) = (self.coordinate(a), self.coordinate(b));
                (p.x - q.x).abs() + (p.y - q.y).abs()
            }
            DistanceMetric::Matrix => match &self.matrix {
                Some(m) => m.get(&self.site(a), &self.site(b)),
                None => f64::INFINITY,
            },
        }
    }
}

/// A breach of an instance invariant.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Violation {
    #[error("duplicate stop id `{0}`")]
    DuplicateStop(StopId),
    #[error("duplicate route id `{0}`")]
    DuplicateRoute(RouteId),
    #[error("duplicate passenger id `{0}`")]
    DuplicatePassenger(PassengerId),
    #[error("stop `{0}` has a non-finite coordinate")]
    NonFiniteStop(StopId),
    #[error("request `{0}` has a non-finite coordinate")]
    NonFiniteRequest(PassengerId),
    #[error("route `{0}` has fewer than two visits")]
    TooFewVisits(RouteId),
    #[error("route `{route}` has non-increasing arrival times at visit {index}")]
    NonIncreasingArrivals { route: RouteId, index: usize },
    #[error("route `{route}` has a negative arrival time")]
    NegativeArrival { route: RouteId },
    #[error("route `{0}` has zero capacity")]
    ZeroCapacity(RouteId),
    #[error("route `{route}` has a dangling stop reference `{stop}`")]
    DanglingStop { route: RouteId, stop: StopId },
    #[error("request `{0}` departs before timestep 0")]
    NegativeDepart(PassengerId),
    #[error("parameter `{name}` is invalid: {reason}")]
    Parameter { name: &'static str, reason: String },
    #[error("metric is `matrix` but the instance has no distance matrix")]
    MissingMatrix,
}

/// Checks every instance invariant; returns one record per breach.
pub fn validate_instance(inst: &Instance) -> Vec<Violation> {
    let mut out = Vec::new();

    let mut seen = HashSet::new();
    for s in &inst.stops {
        if !seen.insert(&s.id) {
            out.push(Violation::DuplicateStop(s.id.clone()));
        }
        if !s.location.is_finite() {
            out.push(Violation::NonFiniteStop(s.id.clone()));
        }
    }

    let mut route_ids = HashSet::new();
    for r in &inst.routes {
        if !route_ids.insert(&r.id) {
            out.push(Violation::DuplicateRoute(r.id.clone()));
        }
        if r.visits.len() < 2 {
            out.push(Violation::TooFewVisits(r.id.clone()));
        }
        if r.capacity == 0 {
            out.push(Violation::ZeroCapacity(r.id.clone()));
        }
        if r.visits.iter().any(|v| v.arrival < 0) {
            out.push(Violation::NegativeArrival { route: r.id.clone() });
        }
        for (i, w) in r.visits.windows(2).enumerate() {
            if w[1].arrival <= w[0].arrival {
                out.push(Violation::NonIncreasingArrivals { route: r.id.clone(), index: i + 1 });
            }
        }
        for v in &r.visits {
            if !seen.contains(&v.stop) {
                out.push(Violation::DanglingStop { route: r.id.clone(), stop: v.stop.clone() });
            }
        }
    }

    let mut passengers = HashSet::new();
    for q in &inst.requests {
        if !passengers.insert(&q.passenger) {
            out.push(Violation::DuplicatePassenger(q.passenger.clone()));
        }
        if q.depart < 0 {
            out.push(Violation::NegativeDepart(q.passenger.clone()));
        }
        if !q.origin.is_finite() || !q.destination.is_finite() {
            out.push(Violation::NonFiniteRequest(q.passenger.clone()));
        }
    }

    let p = &inst.params;
    let mut bad = |name: &'static str, reason: String| out.push(Violation::Parameter { name, reason });
    if !(p.walk_speed > 0.0 && p.walk_speed.is_finite()) {
        bad("walk_speed", format!("must be positive, got {}", p.walk_speed));
    }
    for (name, v) in [("max_access", p.max_access), ("max_egress", p.max_egress), ("max_walk", p.max_walk)] {
        if !(v >= 0.0) {
            bad(name, format!("must be non-negative, got {v}"));
        }
    }
    if p.max_wait < 0 {
        bad("max_wait", format!("must be non-negative, got {}", p.max_wait));
    }
    if p.max_travel < 0 {
        bad("max_travel", format!("must be non-negative, got {}", p.max_travel));
    }
    if !(p.penalty > p.max_travel as f64) {
        bad("penalty", format!("must exceed max_travel {}, got {}", p.max_travel, p.penalty));
    }
    if p.metric == DistanceMetric::Matrix && inst.matrix.is_none() {
        out.push(Violation::MissingMatrix);
    }
    out
}

/// Where a leg of a passenger path takes place.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Place {
    /// The request's origin coordinate.
    Origin,
    /// The request's destination coordinate.
    Destination,
    Stop(StopId),
}

/// One `(location, time)` entry of a passenger path. `route` names the vehicle
/// ridden to reach this leg from the previous one, when the move was a ride.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Leg {
    pub place: Place,
    pub time: Timestep,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub route: Option<RouteId>,
}

impl Leg {
    pub fn new(place: Place, time: Timestep) -> Self {
        Self { place, time, route: None }
    }

    pub fn stop(id: impl Into<StopId>, time: Timestep) -> Self {
        Self::new(Place::Stop(id.into()), time)
    }

    pub fn ride(id: impl Into<StopId>, time: Timestep, route: impl Into<RouteId>) -> Self {
        Self { place: Place::Stop(id.into()), time, route: Some(route.into()) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Itinerary {
    Served(Vec<Leg>),
    /// No feasible path was assigned; the passenger is charged the penalty.
    Unserved,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionPath {
    pub passenger: PassengerId,
    pub itinerary: Itinerary,
    pub cost: f64,
}

impl SolutionPath {
    /// A served path; its cost is the travel time from the first to the last leg.
    pub fn served(passenger: PassengerId, legs: Vec<Leg>) -> Self {
        let cost = match (legs.first(), legs.last()) {
            (Some(a), Some(b)) => (b.time - a.time) as f64,
            _ => 0.0,
        };
        Self { passenger, itinerary: Itinerary::Served(legs), cost }
    }

    pub fn unserved(passenger: PassengerId, penalty: f64) -> Self {
        Self { passenger, itinerary: Itinerary::Unserved, cost: penalty }
    }

    pub fn is_served(&self) -> bool {
        matches!(self.itinerary, Itinerary::Served(_))
    }

    pub fn legs(&self) -> &[Leg] {
        match &self.itinerary {
            Itinerary::Served(l) => l,
            Itinerary::Unserved => &[],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub paths: Vec<SolutionPath>,
    pub total_cost: f64,
    pub bound: f64,
    pub gap: f64,
}

impl Solution {
    pub fn new(paths: Vec<SolutionPath>, bound: f64) -> Self {
        let total_cost: f64 = paths.iter().map(|p| p.cost).sum();
        let gap = if total_cost > 0.0 { ((total_cost - bound) / total_cost).max(0.0) } else { 0.0 };
        Self { paths, total_cost, bound, gap }
    }
}

/// Passenger-path constraints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Constraint {
    /// each consecutive stop pair is a ride, a walk or a wait.
    Movement,
    /// the first stop is within access distance and reachable on foot.
    Access,
    /// the last stop is within egress distance of the destination.
    Egress,
    /// the first vehicle arrival is within the maximum wait.
    FirstWait,
    /// arrival no later than departure plus the maximum travel time.
    Deadline,
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Constraint::Movement => "movement",
            Constraint::Access => "access",
            Constraint::Egress => "egress",
            Constraint::FirstWait => "first wait",
            Constraint::Deadline => "deadline",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Feasibility {
    Feasible,
    /// `leg` is the index of the leg at which the breach was detected.
    Violated { constraint: Constraint, leg: usize },
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible)
    }

    pub fn violated(&self) -> Option<Constraint> {
        match self {
            Feasibility::Feasible => None,
            Feasibility::Violated { constraint, .. } => Some(*constraint),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PathError {
    #[error("passenger `{0}` has no request in the instance")]
    UnknownPassenger(PassengerId),
    #[error("path must start at the origin at the departure time")]
    BadStart,
    #[error("path must end at the destination")]
    BadEnd,
    #[error("path visits no stop")]
    NoStops,
    #[error("origin or destination in the middle of the path (leg {0})")]
    MisplacedEndpoint(usize),
    #[error("unknown stop `{0}`")]
    UnknownStop(StopId),
    #[error("unknown route `{0}`")]
    UnknownRoute(RouteId),
    #[error("time goes backwards at leg {0}")]
    TimeReversal(usize),
    #[error("no vehicle arrives at stop `{stop}` at timestep {time}")]
    NotAnArrival { stop: StopId, time: Timestep },
}

/// Every `(stop, time, next stop, next time)` hop served by some route, with the routes serving it.
fn hop_table(inst: &Instance) -> HashMap<(&StopId, Timestep, &StopId, Timestep), Vec<&RouteId>> {
    let mut hops: HashMap<_, Vec<_>> = HashMap::new();
    for r in &inst.routes {
        for w in r.visits.windows(2) {
            hops.entry((&w[0].stop, w[0].arrival, &w[1].stop, w[1].arrival)).or_default().push(&r.id);
        }
    }
    hops
}

/// Checks a single path against every [`Constraint`]. Capacity is a
/// solution-level property, see [`check_solution_capacity`].
pub fn check_path_feasibility(inst: &Instance, path: &SolutionPath) -> Result<Feasibility, PathError> {
    let p = inst
        .request_index(&path.passenger)
        .ok_or_else(|| PathError::UnknownPassenger(path.passenger.clone()))?;
    let legs = match &path.itinerary {
        Itinerary::Unserved => return Ok(Feasibility::Feasible),
        Itinerary::Served(l) => l,
    };
    let req = &inst.requests[p];
    let params = &inst.params;

    // structure
    match legs.first() {
        Some(Leg { place: Place::Origin, time, .. }) if *time == req.depart => {}
        _ => return Err(PathError::BadStart),
    }
    match legs.last() {
        Some(Leg { place: Place::Destination, .. }) if legs.len() >= 2 => {}
        _ => return Err(PathError::BadEnd),
    }
    if legs.len() < 3 {
        return Err(PathError::NoStops);
    }
    let stop_index = inst.stop_index();
    let route_ids: HashSet<&RouteId> = inst.routes.iter().map(|r| &r.id).collect();
    let mut arrivals: HashSet<(&StopId, Timestep)> = HashSet::new();
    for r in &inst.routes {
        for v in &r.visits {
            arrivals.insert((&v.stop, v.arrival));
        }
    }
    let mut stops = Vec::with_capacity(legs.len() - 2);
    for (i, leg) in legs.iter().enumerate().take(legs.len() - 1).skip(1) {
        let Place::Stop(s) = &leg.place else {
            return Err(PathError::MisplacedEndpoint(i));
        };
        let idx = *stop_index.get(s).ok_or_else(|| PathError::UnknownStop(s.clone()))?;
        if !arrivals.contains(&(s, leg.time)) {
            return Err(PathError::NotAnArrival { stop: s.clone(), time: leg.time });
        }
        if let Some(r) = &leg.route {
            if !route_ids.contains(r) {
                return Err(PathError::UnknownRoute(r.clone()));
            }
        }
        stops.push(idx);
    }
    for i in 1..legs.len() {
        if legs[i].time < legs[i - 1].time {
            return Err(PathError::TimeReversal(i));
        }
    }

    let violated = |constraint, leg| Ok(Feasibility::Violated { constraint, leg });

    // access
    let first = &legs[1];
    let d = inst.distance(SiteRef::Origin(p), SiteRef::Stop(stops[0]));
    if !(d <= params.max_access) || first.time < req.depart + params.walk_time(d) || first.route.is_some() {
        return violated(Constraint::Access, 1);
    }
    // first wait
    if first.time - req.depart > params.max_wait {
        return violated(Constraint::FirstWait, 1);
    }
    // movements
    let hops = hop_table(inst);
    for k in 1..stops.len() {
        let (a, b) = (&legs[k], &legs[k + 1]);
        let (Place::Stop(sa), Place::Stop(sb)) = (&a.place, &b.place) else { unreachable!() };
        let served = hops.get(&(sa, a.time, sb, b.time));
        let ok = match &b.route {
            Some(r) => served.is_some_and(|rs| rs.contains(&r)),
            None => {
                let ride = served.is_some();
                let walk = sa != sb && {
                    let d = inst.distance(SiteRef::Stop(stops[k - 1]), SiteRef::Stop(stops[k]));
                    d <= params.max_walk && b.time - a.time >= params.walk_time(d)
                };
                let wait = sa == sb && a.time < b.time;
                ride || walk || wait
            }
        };
        if !ok {
            return violated(Constraint::Movement, k + 1);
        }
    }
    // egress
    let last = legs.len() - 1;
    let d = inst.distance(SiteRef::Stop(*stops.last().unwrap()), SiteRef::Destination(p));
    if !(d <= params.max_egress) || legs[last].time < legs[last - 1].time + params.walk_time(d) || legs[last].route.is_some() {
        return violated(Constraint::Egress, last);
    }
    // deadline
    if legs[last].time > req.depart + params.max_travel {
        return violated(Constraint::Deadline, last);
    }
    Ok(Feasibility::Feasible)
}

/// Passengers riding each route hop, keyed by `(route index, index of the hop's first visit)`.
pub fn route_loads(inst: &Instance, sol: &Solution) -> HashMap<(usize, usize), u32> {
    let route_index: HashMap<&RouteId, usize> = inst.routes.iter().enumerate().map(|(i, r)| (&r.id, i)).collect();
    let mut load = HashMap::new();
    for path in &sol.paths {
        for w in path.legs().windows(2) {
            let (Some(r), Place::Stop(from), Place::Stop(to)) = (&w[1].route, &w[0].place, &w[1].place) else {
                continue;
            };
            let Some(&ri) = route_index.get(r) else { continue };
            let visits = &inst.routes[ri].visits;
            if let Some(k) = visits.windows(2).position(|v| {
                &v[0].stop == from && v[0].arrival == w[0].time && &v[1].stop == to && v[1].arrival == w[1].time
            }) {
                *load.entry((ri, k)).or_insert(0) += 1;
            }
        }
    }
    load
}

/// Constraint (i): no route hop carries more passengers than the vehicle's capacity.
pub fn check_solution_capacity(inst: &Instance, sol: &Solution) -> bool {
    route_loads(inst, sol).into_iter().all(|((r, _), n)| n <= inst.routes[r].capacity)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn phi1() -> SolutionPath {
        SolutionPath::served(
            "1".into(),
            vec![
                Leg::new(Place::Origin, 0),
                Leg::stop("s3", 3),
                Leg::stop("s1", 5),
                Leg::ride("s2", 6, "r1"),
                Leg::new(Place::Destination, 7),
            ],
        )
    }

    #[test]
    fn worked_example_is_valid() {
        assert!(validate_instance(&fixtures::three_stop_example()).is_empty());
    }

    #[test]
    fn repeated_arrival_time_is_reported() {
        let mut inst = fixtures::three_stop_example();
        inst.routes[0].visits[1].arrival = 5;
        let v = validate_instance(&inst);
        assert_eq!(v.len(), 1);
        assert!(v[0].to_string().contains("non-increasing arrival times"));
    }

    #[test]
    fn dangling_stop_is_reported() {
        let mut inst = fixtures::three_stop_example();
        inst.routes[1].visits[0].stop = "s9".into();
        let v = validate_instance(&inst);
        assert_eq!(v.len(), 1);
        assert!(v[0].to_string().contains("dangling stop reference"));
    }

    #[test]
    fn validation_is_idempotent() {
        let mut inst = fixtures::three_stop_example();
        inst.params.penalty = 5.0;
        inst.requests[0].depart = -1;
        let before = inst.clone();
        let a = validate_instance(&inst);
        let b = validate_instance(&inst);
        assert_eq!(a, b);
        assert_eq!(a.len(), 2);
        assert_eq!(inst, before);
    }

    #[test]
    fn worked_example_path_is_feasible() {
        let inst = fixtures::three_stop_example();
        let p = phi1();
        assert_eq!(p.cost, 7.0);
        assert_eq!(check_path_feasibility(&inst, &p), Ok(Feasibility::Feasible));

        let mut unlabelled = p.clone();
        if let Itinerary::Served(l) = &mut unlabelled.itinerary {
            l[3].route = None;
        }
        assert_eq!(check_path_feasibility(&inst, &unlabelled), Ok(Feasibility::Feasible));
    }

    #[test]
    fn late_arrival_breaks_deadline() {
        let inst = fixtures::three_stop_example();
        let mut p = phi1();
        if let Itinerary::Served(l) = &mut p.itinerary {
            l[4].time = 11;
        }
        let f = check_path_feasibility(&inst, &p).unwrap();
        assert_eq!(f.violated(), Some(Constraint::Deadline));
    }

    #[test]
    fn direct_egress_path_is_feasible() {
        let inst = fixtures::three_stop_example();
        let p = SolutionPath::served(
            "1".into(),
            vec![Leg::new(Place::Origin, 0), Leg::stop("s3", 3), Leg::new(Place::Destination, 10)],
        );
        assert_eq!(p.cost, 10.0);
        assert!(check_path_feasibility(&inst, &p).unwrap().is_feasible());
    }

    #[test]
    fn constraint_tags() {
        let inst = fixtures::three_stop_example();
        let mk = |legs: Vec<Leg>| check_path_feasibility(&inst, &SolutionPath::served("1".into(), legs));
        // s1 at 5 waits 5 > 4
        let f = mk(vec![Leg::new(Place::Origin, 0), Leg::stop("s1", 5), Leg::ride("s2", 6, "r1"), Leg::new(Place::Destination, 7)]);
        assert_eq!(f.unwrap().violated(), Some(Constraint::FirstWait));
        // s2 is 5 away from the origin, beyond access distance 3
        let f = mk(vec![Leg::new(Place::Origin, 0), Leg::stop("s2", 6), Leg::new(Place::Destination, 7)]);
        assert_eq!(f.unwrap().violated(), Some(Constraint::Access));
        // s3 -> s2 is neither a ride nor a feasible walk
        let f = mk(vec![Leg::new(Place::Origin, 0), Leg::stop("s3", 3), Leg::stop("s2", 6), Leg::new(Place::Destination, 7)]);
        assert_eq!(f.unwrap().violated(), Some(Constraint::Movement));
        // wrong route label
        let f = mk(vec![
            Leg::new(Place::Origin, 0),
            Leg::stop("s3", 3),
            Leg::stop("s1", 5),
            Leg::ride("s2", 6, "r2"),
            Leg::new(Place::Destination, 7),
        ]);
        assert_eq!(f.unwrap().violated(), Some(Constraint::Movement));
        // s1 is 10 away from the destination
        let f = mk(vec![Leg::new(Place::Origin, 0), Leg::stop("s3", 3), Leg::stop("s1", 5), Leg::new(Place::Destination, 7)]);
        assert_eq!(f.unwrap().violated(), Some(Constraint::Egress));
        // egress walk takes one timestep
        let f = mk(vec![
            Leg::new(Place::Origin, 0),
            Leg::stop("s3", 3),
            Leg::stop("s1", 5),
            Leg::ride("s2", 6, "r1"),
            Leg::new(Place::Destination, 6),
        ]);
        assert_eq!(f.unwrap().violated(), Some(Constraint::Egress));
    }

    #[test]
    fn structural_errors() {
        let inst = fixtures::three_stop_example();
        let mk = |legs: Vec<Leg>| check_path_feasibility(&inst, &SolutionPath::served("1".into(), legs));
        assert_eq!(mk(vec![Leg::stop("s3", 3), Leg::new(Place::Destination, 10)]), Err(PathError::BadStart));
        assert_eq!(
            mk(vec![Leg::new(Place::Origin, 0), Leg::stop("s3", 5), Leg::stop("s3", 3), Leg::new(Place::Destination, 10)]),
            Err(PathError::TimeReversal(2))
        );
        assert_eq!(
            mk(vec![Leg::new(Place::Origin, 0), Leg::stop("s3", 4), Leg::new(Place::Destination, 11)]),
            Err(PathError::NotAnArrival { stop: "s3".into(), time: 4 })
        );
        assert_eq!(mk(vec![Leg::new(Place::Origin, 0), Leg::new(Place::Destination, 3)]), Err(PathError::NoStops));
        let stranger = SolutionPath::unserved("42".into(), 100.0);
        assert_eq!(check_path_feasibility(&inst, &stranger), Err(PathError::UnknownPassenger("42".into())));
    }

    #[test]
    fn unserved_path_is_feasible_and_costs_penalty() {
        let inst = fixtures::three_stop_example();
        let p = SolutionPath::unserved("1".into(), inst.params.penalty);
        assert!(check_path_feasibility(&inst, &p).unwrap().is_feasible());
        assert_eq!(p.cost, 100.0);
    }

    fn contention_paths(rider_b: bool) -> Solution {
        let ride = |pid: &str| {
            SolutionPath::served(
                pid.into(),
                vec![Leg::new(Place::Origin, 0), Leg::stop("A", 1), Leg::ride("B", 3, "fast"), Leg::new(Place::Destination, 3)],
            )
        };
        let slow = |pid: &str| {
            SolutionPath::served(
                pid.into(),
                vec![Leg::new(Place::Origin, 0), Leg::stop("A", 4), Leg::ride("B", 6, "slow"), Leg::new(Place::Destination, 6)],
            )
        };
        let second = if rider_b { ride("b") } else { slow("b") };
        Solution::new(vec![ride("a"), second], 0.0)
    }

    #[test]
    fn capacity_check() {
        let inst = fixtures::contention_instance();
        for p in &contention_paths(true).paths {
            assert!(check_path_feasibility(&inst, p).unwrap().is_feasible());
        }
        assert!(!check_solution_capacity(&inst, &contention_paths(true)));
        assert!(check_solution_capacity(&inst, &contention_paths(false)));

        let mut one = fixtures::contention_instance();
        one.requests.truncate(1);
        let sol = Solution::new(contention_paths(true).paths[..1].to_vec(), 0.0);
        assert!(check_solution_capacity(&one, &sol));
    }

    #[test]
    fn solution_accounting() {
        let s = contention_paths(false);
        assert_eq!(s.total_cost, 9.0);
        let s = Solution::new(s.paths, 9.0);
        assert_eq!(s.gap, 0.0);
        assert_eq!(Parameters::default_penalty(10), 100.0);
    }

    #[test]
    fn walk_time_rounds_up() {
        let mut p = fixtures::three_stop_example().params;
        assert_eq!(p.walk_time(3.0), 3);
        p.walk_speed = 2.0;
        assert_eq!(p.walk_time(3.0), 2);
        assert_eq!(p.walk_time(0.1 + 0.2 + 3.7), 2);
        assert_eq!(p.walk_time(0.0), 0);
    }
}
