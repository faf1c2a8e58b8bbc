//! Solution and report artifacts. JSON objects are emitted with sorted keys so
//! identical runs produce byte-identical files.

use serde_json::{json, Value};
use transit_cg::graph::{reconstruct_solution_path, TimeExpandedGraph};
use transit_cg::master::{extract_solution, MasterState};
use transit_cg::model::Instance;
use transit_cg::solver::{CgReport, IntegerResult};

/// Prints integral values without a fractional part.
pub fn clean(v: f64) -> String {
    if v.is_finite() && (v - v.round()).abs() < 1e-9 {
        format!("{}", v.round() as i64)
    } else {
        format!("{v}")
    }
}

pub fn to_sorted_json(v: &Value) -> String {
    // serde_json's default map is ordered by key
    let mut s = serde_json::to_string_pretty(v).expect("json values always serialize");
    s.push('\n');
    s
}

fn gap(total: f64, bound: f64) -> f64 {
    if total > 0.0 {
        ((total - bound) / total).max(0.0)
    } else {
        0.0
    }
}

pub fn solution_json(
    ms: &MasterState,
    g: &TimeExpandedGraph,
    inst: &Instance,
    report: &CgReport,
    integer: Option<&IntegerResult>,
) -> Value {
    if let Some(ip) = integer {
        let passengers: Vec<Value> = ip
            .solution
            .paths
            .iter()
            .map(|sp| json!({ "passenger": sp.passenger, "served": sp.is_served(), "cost": sp.cost, "legs": sp.legs() }))
            .collect();
        return json!({
            "mode": "integer",
            "status": ip.status,
            "total_cost": ip.solution.total_cost,
            "bound": ip.bound,
            "gap": ip.gap,
            "passengers": passengers,
        });
    }

    let passengers: Vec<Value> = extract_solution(ms, g)
        .map(|frac| {
            frac.assignments
                .iter()
                .map(|a| {
                    let mut served = 0.0;
                    let columns: Vec<Value> = a
                        .columns
                        .iter()
                        .map(|&(k, weight)| {
                            let col = ms.column(k);
                            let legs = col.to_path(g).map(|path| reconstruct_solution_path(g, &path, inst).legs().to_vec());
                            if legs.is_some() {
                                served += weight;
                            }
                            json!({ "weight": weight, "cost": col.cost, "legs": legs })
                        })
                        .collect();
                    json!({ "passenger": a.passenger, "served": served, "cost": a.cost, "columns": columns })
                })
                .collect()
        })
        .unwrap_or_default();
    json!({
        "mode": "lp",
        "status": report.status,
        "total_cost": report.objective,
        "bound": report.lb,
        "gap": gap(report.objective, report.lb),
        "passengers": passengers,
    })
}

/// The column generation report plus the integer stage outcome. Timings are
/// included, so this file is not expected to be reproducible byte for byte.
pub fn report_json(report: &CgReport, integer: Option<&IntegerResult>) -> Value {
    let mut v = serde_json::to_value(report).expect("reports always serialize");
    if let Some(ip) = integer {
        v["integer"] = json!({
            "status": ip.status,
            "total_cost": ip.solution.total_cost,
            "bound": ip.bound,
            "gap": ip.gap,
            "nodes": ip.nodes,
        });
    }
    v
}

pub fn summary(report: &CgReport, integer: Option<&IntegerResult>, pool: usize) -> String {
    let mut s = format!(
        "status={:?} lp={} lb={} iterations={} columns={} priced={}",
        report.status,
        clean(report.objective),
        clean(report.lb),
        report.iterations.len(),
        pool,
        report.total_priced
    );
    if let Some(ip) = integer {
        let served = ip.solution.paths.iter().filter(|p| p.is_served()).count();
        s += &format!(
            " integer={} gap={} served={}/{} nodes={}",
            clean(ip.solution.total_cost),
            clean(ip.gap),
            served,
            ip.solution.paths.len(),
            ip.nodes
        );
    }
    s.push('\n');
    s
}
