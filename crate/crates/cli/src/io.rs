//! Instance files: `stops.csv`, `routes.csv`, `stop_times.csv` and the optional
//! `distances.csv` form the network directory; requests live in a demand CSV
//! and parameters in a flat `key=value` file.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use transit_cg::model::{
    validate_instance, Coordinate, DistanceMatrix, DistanceMetric, Instance, Parameters, Request, RouteSchedule, Site,
    Stop, Timestep, Violation, Visit,
};

pub const STOPS: &str = "stops.csv";
pub const ROUTES: &str = "routes.csv";
pub const STOP_TIMES: &str = "stop_times.csv";
pub const DISTANCES: &str = "distances.csv";
pub const DEMAND: &str = "demand.csv";
pub const PARAMS: &str = "params.txt";

#[derive(Debug, Error)]
pub enum InputError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: u64, message: String },
    #[error("invalid instance:\n{}", format_violations(.0))]
    Invalid(Vec<Violation>),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(|v| format!("  - {v}")).collect::<Vec<_>>().join("\n")
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> InputError + '_ {
    move |source| InputError::Io { path: path.to_path_buf(), source }
}

fn parse_err(path: &Path, line: u64, message: impl Into<String>) -> InputError {
    InputError::Parse { path: path.to_path_buf(), line, message: message.into() }
}

#[derive(Debug, Serialize, Deserialize)]
struct StopRow {
    stop_id: String,
    x: f64,
    y: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct RouteRow {
    route_id: String,
    capacity: u32,
}

#[derive(Debug, Serialize, Deserialize)]
struct StopTimeRow {
    route_id: String,
    stop_id: String,
    arrival_time: Timestep,
    seq: u32,
}

#[derive(Debug, Serialize, Deserialize)]
struct DemandRow {
    passenger_id: String,
    ox: f64,
    oy: f64,
    dx: f64,
    dy: f64,
    depart: Timestep,
}

#[derive(Debug, Serialize, Deserialize)]
struct DistanceRow {
    from: String,
    to: String,
    distance: f64,
}

/// Reads every record of `path`, tagging each with its 1-based file line.
fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<(u64, T)>, InputError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| parse_err(path, 1, e.to_string()))?.clone();
    let mut out = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| parse_err(path, e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        let row = rec.deserialize(Some(&headers)).map_err(|e| {
            let message = match e.kind() {
                csv::ErrorKind::Deserialize { err, .. } => err.to_string(),
                _ => e.to_string(),
            };
            parse_err(path, line, message)
        })?;
        out.push((line, row));
    }
    Ok(out)
}

fn write_rows<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>, header: &[&str]) -> Result<(), InputError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut empty = true;
    for row in rows {
        w.serialize(row).map_err(|e| parse_err(path, 0, e.to_string()))?;
        empty = false;
    }
    if empty {
        w.write_record(header).map_err(|e| parse_err(path, 0, e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| parse_err(path, 0, e.to_string()))?;
    fs::write(path, bytes).map_err(io_err(path))
}

/// Parses a `key=value` parameter file. Blank lines and `#` comments are skipped.
pub fn parse_params(path: &Path) -> Result<Parameters, InputError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let mut values: BTreeMap<String, (u64, String)> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = (i + 1) as u64;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((k, v)) = content.split_once('=') else {
            return Err(parse_err(path, line, format!("expected key=value, got `{content}`")));
        };
        let key = k.trim().to_ascii_lowercase();
        if values.insert(key.clone(), (line, v.trim().to_owned())).is_some() {
            return Err(parse_err(path, line, format!("duplicate key `{key}`")));
        }
    }

    const KNOWN: [&str; 8] = ["xi", "delta_a", "delta_e", "delta_w", "upsilon", "t_max", "rho", "metric"];
    if let Some((k, (line, _))) = values.iter().find(|(k, _)| !KNOWN.contains(&k.as_str())) {
        return Err(parse_err(path, *line, format!("unknown key `{k}`")));
    }
    let eof = text.lines().count() as u64;
    let get = |key: &str| values.get(key).ok_or_else(|| parse_err(path, eof, format!("missing key `{key}`")));
    let float = |key: &str| -> Result<f64, InputError> {
        let (line, v) = get(key)?;
        v.parse().map_err(|_| parse_err(path, *line, format!("`{key}` is not a number: `{v}`")))
    };
    let int = |key: &str| -> Result<Timestep, InputError> {
        let (line, v) = get(key)?;
        v.parse().map_err(|_| parse_err(path, *line, format!("`{key}` is not an integer: `{v}`")))
    };

    let max_travel = int("t_max")?;
    let penalty = if values.contains_key("rho") { float("rho")? } else { Parameters::default_penalty(max_travel) };
    let metric = match values.get("metric") {
        None => DistanceMetric::Euclidean,
        Some((line, v)) => v.parse().map_err(|e: String| parse_err(path, *line, e))?,
    };
    Ok(Parameters {
        walk_speed: float("xi")?,
        max_access: float("delta_a")?,
        max_egress: float("delta_e")?,
        max_walk: float("delta_w")?,
        max_wait: int("upsilon")?,
        max_travel,
        penalty,
        metric,
    })
}

pub fn format_params(p: &Parameters) -> String {
    format!(
        "xi={}\ndelta_a={}\ndelta_e={}\ndelta_w={}\nupsilon={}\nt_max={}\nrho={}\nmetric={}\n",
        p.walk_speed, p.max_access, p.max_egress, p.max_walk, p.max_wait, p.max_travel, p.penalty, p.metric
    )
}

fn load_network(dir: &Path) -> Result<(Vec<Stop>, Vec<RouteSchedule>), InputError> {
    let stops = read_rows::<StopRow>(&dir.join(STOPS))?
        .into_iter()
        .map(|(_, r)| Stop { id: r.stop_id.into(), location: Coordinate::new(r.x, r.y) })
        .collect();

    let routes_path = dir.join(ROUTES);
    let mut routes: Vec<RouteSchedule> = Vec::new();
    let mut position = BTreeMap::new();
    for (line, r) in read_rows::<RouteRow>(&routes_path)? {
        if position.insert(r.route_id.clone(), routes.len()).is_some() {
            return Err(parse_err(&routes_path, line, format!("duplicate route `{}`", r.route_id)));
        }
        routes.push(RouteSchedule { id: r.route_id.into(), visits: Vec::new(), capacity: r.capacity });
    }

    let times_path = dir.join(STOP_TIMES);
    let mut calls: Vec<Vec<(u32, u64, Visit)>> = vec![Vec::new(); routes.len()];
    for (line, r) in read_rows::<StopTimeRow>(&times_path)? {
        let Some(&k) = position.get(&r.route_id) else {
            return Err(parse_err(&times_path, line, format!("unknown route `{}`", r.route_id)));
        };
        calls[k].push((r.seq, line, Visit { stop: r.stop_id.into(), arrival: r.arrival_time }));
    }
    for (route, mut c) in routes.iter_mut().zip(calls) {
        c.sort_by_key(|(seq, _, _)| *seq);
        if let Some(w) = c.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(parse_err(&times_path, w[1].1, format!("duplicate seq {} on route `{}`", w[1].0, route.id)));
        }
        route.visits = c.into_iter().map(|(_, _, v)| v).collect();
    }
    Ok((stops, routes))
}

fn load_demand(path: &Path) -> Result<Vec<Request>, InputError> {
    let rows = read_rows::<DemandRow>(path)?;
    let mut out = Vec::with_capacity(rows.len());
    for (line, r) in rows {
        if r.depart < 0 {
            return Err(parse_err(path, line, format!("passenger `{}` has negative depart time {}", r.passenger_id, r.depart)));
        }
        out.push(Request {
            passenger: r.passenger_id.into(),
            origin: Coordinate::new(r.ox, r.oy),
            destination: Coordinate::new(r.dx, r.dy),
            depart: r.depart,
        });
    }
    Ok(out)
}

fn load_matrix(path: &Path) -> Result<DistanceMatrix, InputError> {
    let mut m = DistanceMatrix::new();
    for (line, r) in read_rows::<DistanceRow>(path)? {
        if !(r.distance >= 0.0) {
            return Err(parse_err(path, line, format!("distance must be non-negative, got {}", r.distance)));
        }
        m.insert(Site::parse_label(&r.from), Site::parse_label(&r.to), r.distance);
    }
    Ok(m)
}

/// Loads and validates an instance.
pub fn load_instance(network: &Path, demand: &Path, params: &Path) -> Result<Instance, InputError> {
    let (stops, routes) = load_network(network)?;
    let requests = load_demand(demand)?;
    let params = parse_params(params)?;
    let dist = network.join(DISTANCES);
    let matrix = if dist.exists() { Some(load_matrix(&dist)?) } else { None };
    let inst = Instance { stops, routes, requests, params, matrix };
    let violations = validate_instance(&inst);
    if !violations.is_empty() {
        return Err(InputError::Invalid(violations));
    }
    Ok(inst)
}

/// Loads an instance directory written by [`write_instance`].
pub fn load_instance_dir(dir: &Path) -> Result<Instance, InputError> {
    load_instance(dir, &dir.join(DEMAND), &dir.join(PARAMS))
}

/// Writes network, demand and parameter files into `dir`.
pub fn write_instance(inst: &Instance, dir: &Path) -> Result<(), InputError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    write_rows(
        &dir.join(STOPS),
        inst.stops.iter().map(|s| StopRow { stop_id: s.id.to_string(), x: s.location.x, y: s.location.y }),
        &["stop_id", "x", "y"],
    )?;
    write_rows(
        &dir.join(ROUTES),
        inst.routes.iter().map(|r| RouteRow { route_id: r.id.to_string(), capacity: r.capacity }),
        &["route_id", "capacity"],
    )?;
    write_rows(
        &dir.join(STOP_TIMES),
        inst.routes.iter().flat_map(|r| {
            r.visits.iter().enumerate().map(|(k, v)| StopTimeRow {
                route_id: r.id.to_string(),
                stop_id: v.stop.to_string(),
                arrival_time: v.arrival,
                seq: k as u32 + 1,
            })
        }),
        &["route_id", "stop_id", "arrival_time", "seq"],
    )?;
    write_rows(
        &dir.join(DEMAND),
        inst.requests.iter().map(|r| DemandRow {
            passenger_id: r.passenger.to_string(),
            ox: r.origin.x,
            oy: r.origin.y,
            dx: r.destination.x,
            dy: r.destination.y,
            depart: r.depart,
        }),
        &["passenger_id", "ox", "oy", "dx", "dy", "depart"],
    )?;
    let dist = dir.join(DISTANCES);
    match &inst.matrix {
        Some(m) => write_rows(
            &dist,
            m.iter().map(|(a, b, d)| DistanceRow { from: a.label(), to: b.label(), distance: d }),
            &["from", "to", "distance"],
        )?,
        None if dist.exists() => fs::remove_file(&dist).map_err(io_err(&dist))?,
        None => {}
    }
    let params = dir.join(PARAMS);
    fs::write(&params, format_params(&inst.params)).map_err(io_err(&params))
}
