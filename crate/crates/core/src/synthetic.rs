//! Seeded random instances: at most 10 stops, 5 routes, 20 passengers, and
//! capacities between 1 and 3.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::model::{
    Coordinate, DistanceMetric, Instance, Parameters, Request, RouteSchedule, Stop, Timestep, Visit,
};

pub fn random_instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_stops = rng.gen_range(4..=10);
    let stops: Vec<Stop> = (0..n_stops)
        .map(|i| Stop {
            id: format!("s{i}").into(),
            location: Coordinate::new(rng.gen_range(0..=12) as f64, rng.gen_range(0..=12) as f64),
        })
        .collect();

    let n_routes = rng.gen_range(2..=5);
    let mut routes = Vec::with_capacity(n_routes);
    for r in 0..n_routes {
        let mut order: Vec<usize> = (0..n_stops).collect();
        order.shuffle(&mut rng);
        order.truncate(rng.gen_range(2..=n_stops.min(5)));
        let mut t: Timestep = rng.gen_range(0..=8);
        let mut visits = Vec::with_capacity(order.len());
        for (k, &s) in order.iter().enumerate() {
            if k > 0 {
                let (a, b) = (stops[order[k - 1]].location, stops[s].location);
                let d = ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt();
                t += ((d / 2.0).ceil() as Timestep).max(1) + rng.gen_range(0..=1);
            }
            visits.push(Visit { stop: stops[s].id.clone(), arrival: t });
        }
        routes.push(RouteSchedule { id: format!("r{r}").into(), visits, capacity: rng.gen_range(1..=3) });
    }

    let n_pass = rng.gen_range(1..=20);
    let jitter = |c: Coordinate, rng: &mut ChaCha8Rng| {
        Coordinate::new(c.x + rng.gen_range(-1..=1) as f64, c.y + rng.gen_range(-1..=1) as f64)
    };
    let location = |id: &str| stops.iter().find(|s| s.id.as_str() == id).unwrap().location;
    let requests = (0..n_pass)
        .map(|p| {
            // Most requests follow some route so that the network is contested;
            // the rest are arbitrary and may be unservable.
            let (origin, destination, depart) = if rng.gen_bool(0.8) {
                let route = &routes[rng.gen_range(0..routes.len())];
                let i = rng.gen_range(0..route.visits.len() - 1);
                let j = rng.gen_range(i + 1..route.visits.len());
                let depart = (route.visits[i].arrival - rng.gen_range(0..=3)).max(0);
                let o = jitter(location(route.visits[i].stop.as_str()), &mut rng);
                let d = jitter(location(route.visits[j].stop.as_str()), &mut rng);
                (o, d, depart)
            } else {
                let o = Coordinate::new(rng.gen_range(0..=12) as f64, rng.gen_range(0..=12) as f64);
                let d = Coordinate::new(rng.gen_range(0..=12) as f64, rng.gen_range(0..=12) as f64);
                (o, d, rng.gen_range(0..=8))
            };
            Request { passenger: format!("p{p}").into(), origin, destination, depart }
        })
        .collect();

    Instance {
        stops,
        routes,
        requests,
        params: Parameters {
            walk_speed: 1.0,
            max_access: 2.5,
            max_egress: 2.5,
            max_walk: 3.0,
            max_wait: 6,
            max_travel: 25,
            penalty: Parameters::default_penalty(25),
            metric: DistanceMetric::Euclidean,
        },
        matrix: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_instance;

    #[test]
    fn bounded_valid_and_deterministic() {
        for seed in 0..200 {
            let inst = random_instance(seed);
            assert!(validate_instance(&inst).is_empty(), "seed {seed}");
            assert!(inst.stops.len() <= 10 && inst.routes.len() <= 5 && inst.requests.len() <= 20);
            assert!(inst.routes.iter().all(|r| (1..=3).contains(&r.capacity)));
        }
        assert_eq!(random_instance(7), random_instance(7));
    }
}
