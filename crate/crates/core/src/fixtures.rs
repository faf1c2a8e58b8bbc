//! Small hand-built instances used by the test suites and the bundled data files.

use crate::model::{
    Coordinate, DistanceMatrix, DistanceMetric, Instance, Parameters, Request, RouteSchedule, Site, Stop, Visit,
};

fn route(id: &str, capacity: u32, visits: &[(&str, i64)]) -> RouteSchedule {
    RouteSchedule {
        id: id.into(),
        capacity,
        visits: visits.iter().map(|&(s, t)| Visit { stop: s.into(), arrival: t }).collect(),
    }
}

/// Three stops, three capacity-one trips and a single passenger departing at 0,
/// with an explicit (non-metric) distance table.
pub fn three_stop_example() -> Instance {
    let stops = ["s1", "s2", "s3"]
        .iter()
        .enumerate()
        .map(|(i, s)| Stop { id: (*s).into(), location: Coordinate::new(i as f64, 0.0) })
        .collect();
    let routes = vec![
        route("r1", 1, &[("s1", 5), ("s2", 6)]),
        route("r2", 1, &[("s2", 2), ("s3", 3)]),
        route("r3", 1, &[("s1", 1), ("s2", 2), ("s3", 5)]),
    ];
    let requests = vec![Request {
        passenger: "1".into(),
        origin: Coordinate::new(0.0, 0.0),
        destination: Coordinate::new(0.0, 0.0),
        depart: 0,
    }];
    let mut m = DistanceMatrix::new();
    let stop = |s: &str| Site::Stop(s.into());
    m.insert(stop("s1"), stop("s2"), 6.0);
    m.insert(stop("s1"), stop("s3"), 1.0);
    m.insert(stop("s2"), stop("s3"), 4.0);
    for (s, o, d) in [("s1", 3.0, 10.0), ("s2", 5.0, 1.0), ("s3", 2.0, 7.0)] {
        m.insert(Site::Origin("1".into()), stop(s), o);
        m.insert(stop(s), Site::Destination("1".into()), d);
    }
    Instance {
        stops,
        routes,
        requests,
        params: Parameters {
            walk_speed: 1.0,
            max_access: 3.0,
            max_egress: 7.0,
            max_walk: 4.0,
            max_wait: 4,
            max_travel: 10,
            penalty: Parameters::default_penalty(10),
            metric: DistanceMetric::Matrix,
        },
        matrix: Some(m),
    }
}

/// Two identical passengers from stop `A` to stop `B`. The fast trip (cost 3)
/// holds one passenger; the slow trip (cost 6) holds five.
pub fn contention_instance() -> Instance {
    contention_with_bystanders(0)
}

/// [`contention_instance`] plus `extra` passengers travelling on an unrelated,
/// uncongested line `C -> D`.
pub fn contention_with_bystanders(extra: usize) -> Instance {
    let stops = vec![
        Stop { id: "A".into(), location: Coordinate::new(0.0, 0.0) },
        Stop { id: "B".into(), location: Coordinate::new(8.0, 0.0) },
        Stop { id: "C".into(), location: Coordinate::new(0.0, 20.0) },
        Stop { id: "D".into(), location: Coordinate::new(8.0, 20.0) },
    ];
    let mut routes = vec![route("fast", 1, &[("A", 1), ("B", 3)]), route("slow", 5, &[("A", 4), ("B", 6)])];
    let mut requests: Vec<Request> = ["a", "b"]
        .iter()
        .map(|p| Request {
            passenger: (*p).into(),
            origin: Coordinate::new(0.0, 0.0),
            destination: Coordinate::new(8.0, 0.0),
            depart: 0,
        })
        .collect();
    if extra > 0 {
        routes.push(route("side", 50, &[("C", 2), ("D", 4)]));
        for k in 0..extra {
            requests.push(Request {
                passenger: format!("x{k}").into(),
                origin: Coordinate::new(0.0, 20.0),
                destination: Coordinate::new(8.0, 20.0),
                depart: 0,
            });
        }
    }
    Instance {
        stops,
        routes,
        requests,
        params: Parameters {
            walk_speed: 1.0,
            max_access: 1.0,
            max_egress: 1.0,
            max_walk: 1.0,
            max_wait: 5,
            max_travel: 20,
            penalty: Parameters::default_penalty(20),
            metric: DistanceMetric::Euclidean,
        },
        matrix: None,
    }
}
