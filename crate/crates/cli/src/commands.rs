//! The five subcommands. Each reads one scenario section and writes its
//! artifacts into the output directory.

use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use umbilic_core::foliation::integrate_seeds;
use umbilic_core::umbilic::{enrich, origin_record};
use umbilic_core::{
    find_umbilics, index_at_with, poincare_returns, Branch, CircleSample,
    CurvatureLine, HalfIndex, MongeSurface, Ray, SamplingOptions, Termination, UmbilicRecord,
};

use crate::output::{num, to_csv, to_json, write_atomic};
use crate::scenario::{Circle, Scenario, UmbilicSearch};
use crate::svg::{psi_plot, Plot};
use crate::CliError;

fn section<'a, T>(s: &'a Option<T>, name: &str) -> Result<&'a T, CliError> {
    s.as_ref()
        .ok_or_else(|| CliError::Input(format!("scenario has no \"{name}\" section")))
}

/// The organizing umbilic (if any) followed by the detected ones, each with
/// index, J and classification.
pub fn locate_umbilics(
    s: &MongeSurface,
    search: &UmbilicSearch,
) -> Result<Vec<UmbilicRecord>, CliError> {
    let found = find_umbilics(s, search.disk_radius, search.grid_n, search.tol)
        .map_err(|e| CliError::from_core("umbilic search", e))?;
    let mut records: Vec<UmbilicRecord> = origin_record(s).into_iter().chain(found).collect();
    enrich(s, &mut records, search.index_radius);
    Ok(records)
}

fn opt_num(x: Option<f64>) -> String {
    x.map_or_else(String::new, num)
}

fn umbilic_rows(records: &[UmbilicRecord]) -> Vec<Vec<String>> {
    records
        .iter()
        .map(|r| {
            vec![
                num(r.location[0]),
                num(r.location[1]),
                num(r.residual),
                opt_num(r.index.map(HalfIndex::value)),
                opt_num(r.j),
                r.classification
                    .map(|c| serde_json::to_value(c).expect("enum").as_str().unwrap_or("").to_string())
                    .unwrap_or_default(),
            ]
        })
        .collect()
}

const UMBILIC_HEADER: [&str; 6] = ["x", "y", "residual", "index", "J", "classification"];

#[derive(Serialize)]
struct CircleEntry {
    center: [f64; 2],
    radius: f64,
    index: HalfIndex,
    refinements: usize,
    valid: bool,
    samples: usize,
}

#[derive(Serialize)]
struct IndexFile<'a> {
    scenario: &'a str,
    circles: Vec<CircleEntry>,
}

fn sample_rows(max: &[CircleSample], min: &[CircleSample]) -> Vec<Vec<String>> {
    let mut all: Vec<&CircleSample> = max.iter().chain(min).collect();
    all.sort_by(|a, b| a.theta.total_cmp(&b.theta).then(a.branch.as_str().cmp(b.branch.as_str())));
    all.into_iter()
        .map(|s| vec![num(s.theta), num(s.psi), s.branch.to_string()])
        .collect()
}

fn circle_label(k: usize, c: &Circle) -> String {
    format!("circle {k} (center [{}, {}], radius {})", c.center[0], c.center[1], c.radius)
}

pub fn cmd_index(sc: &Scenario, out: &Path) -> Result<(), CliError> {
    let sec = section(&sc.index, "index")?;
    let s = sc.surface()?;
    let opts = SamplingOptions::from(sec.sampling);
    let reports: Vec<_> = sec
        .circles
        .par_iter()
        .map(|c| index_at_with(&s, c.center, c.radius, &opts))
        .collect();
    let mut entries = Vec::new();
    let mut files = Vec::new();
    for (k, (c, r)) in sec.circles.iter().zip(reports).enumerate() {
        let r = r.map_err(|e| CliError::from_core(&circle_label(k, c), e))?;
        files.push((
            format!("index_circle{k}.csv"),
            to_csv(&["theta", "psi", "branch"], sample_rows(&r.samples_max, &r.samples_min)),
        ));
        let title = format!("{}: {}, index {}", sc.name, circle_label(k, c), r.index);
        files.push((
            format!("index_circle{k}.svg"),
            psi_plot(&r.samples_max, &r.samples_min, &title).into_bytes(),
        ));
        entries.push(CircleEntry {
            center: r.center,
            radius: r.radius,
            index: r.index,
            refinements: r.refinements,
            valid: r.valid,
            samples: r.samples_max.len(),
        });
    }
    files.push((
        "index_report.json".into(),
        to_json(&IndexFile {
            scenario: &sc.name,
            circles: entries,
        }),
    ));
    for (name, bytes) in files {
        write_atomic(out, &name, &bytes)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct UmbilicFile<'a> {
    scenario: &'a str,
    umbilics: &'a [UmbilicRecord],
}

pub fn cmd_umbilics(sc: &Scenario, out: &Path) -> Result<(), CliError> {
    let search = section(&sc.umbilics, "umbilics")?;
    let s = sc.surface()?;
    let records = locate_umbilics(&s, search)?;
    write_atomic(
        out,
        "umbilics.json",
        &to_json(&UmbilicFile {
            scenario: &sc.name,
            umbilics: &records,
        }),
    )?;
    write_atomic(out, "umbilics.csv", &to_csv(&UMBILIC_HEADER, umbilic_rows(&records)))
}

#[derive(Serialize)]
struct HalfTrace {
    termination: Termination,
    arclength: f64,
    points: usize,
}

#[derive(Serialize)]
struct TraceEntry {
    trace_id: usize,
    branch: Branch,
    seed: [f64; 2],
    arclength: f64,
    forward: HalfTrace,
    backward: Option<HalfTrace>,
}

#[derive(Serialize)]
struct FoliationFile<'a> {
    scenario: &'a str,
    umbilics: &'a [UmbilicRecord],
    traces: Vec<TraceEntry>,
}

fn branch_color(b: Branch) -> &'static str {
    match b {
        Branch::Max => "#1f4fbf",
        Branch::Min => "#2e8b3a",
    }
}

pub fn cmd_foliation(sc: &Scenario, out: &Path) -> Result<(), CliError> {
    let sec = section(&sc.foliation, "foliation")?;
    let s = sc.surface()?;
    let umbilics = locate_umbilics(&s, &sec.umbilics)?;
    let opts = sec
        .integrator
        .options(umbilics.iter().map(|u| u.location).collect(), Some(sec.bounds));
    let c = sec.seed_circle;
    let mut seeds: Vec<[f64; 2]> = (0..sec.seeds)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / sec.seeds as f64;
            [c.center[0] + c.radius * t.cos(), c.center[1] + c.radius * t.sin()]
        })
        .collect();
    seeds.extend(&sec.extra_seeds);

    let mut lines: Vec<(Branch, CurvatureLine)> = Vec::new();
    for &branch in &sec.branches {
        for (seed, line) in seeds.iter().zip(integrate_seeds(&s, &seeds, branch, &opts)) {
            let line = line.map_err(|e| {
                CliError::from_core(&format!("{branch} line from ({}, {})", seed[0], seed[1]), e)
            })?;
            lines.push((branch, line));
        }
    }

    let half = |t: &umbilic_core::Trace| HalfTrace {
        termination: t.termination,
        arclength: t.arclength,
        points: t.points.len(),
    };
    let mut rows = Vec::new();
    let mut entries = Vec::new();
    let mut plot = Plot::new(sec.bounds, true);
    plot.circle(c.center, c.radius, "#3060ff");
    for (id, (branch, line)) in lines.iter().enumerate() {
        let pts = line.points();
        for (seq, p) in pts.iter().enumerate() {
            rows.push(vec![id.to_string(), seq.to_string(), num(p[0]), num(p[1])]);
        }
        plot.polyline(&pts, branch_color(*branch), 1.0);
        entries.push(TraceEntry {
            trace_id: id,
            branch: *branch,
            seed: line.seed,
            arclength: line.arclength(),
            forward: half(&line.forward),
            backward: line.backward.as_ref().map(half),
        });
    }
    for u in &umbilics {
        plot.dot(u.location, 5.0, "black");
    }
    let svg = plot.finish(&format!("{}: lines of curvature", sc.name));
    write_atomic(out, "traces.csv", &to_csv(&["trace_id", "seq", "x", "y"], rows))?;
    write_atomic(
        out,
        "traces.json",
        &to_json(&FoliationFile {
            scenario: &sc.name,
            umbilics: &umbilics,
            traces: entries,
        }),
    )?;
    write_atomic(out, "foliation.svg", svg.as_bytes())
}

/// Direction of a sequence: +1 strictly increasing, -1 strictly decreasing,
/// 0 otherwise.
fn monotonicity(v: &[f64]) -> i32 {
    let d: Vec<f64> = v.windows(2).map(|w| w[1] - w[0]).collect();
    if !d.is_empty() && d.iter().all(|&x| x > 0.0) {
        1
    } else if !d.is_empty() && d.iter().all(|&x| x < 0.0) {
        -1
    } else {
        0
    }
}

#[derive(Serialize)]
struct PoincareFile<'a> {
    scenario: &'a str,
    ray: [f64; 2],
    start: [f64; 2],
    branch: Branch,
    requested: usize,
    returns: &'a [f64],
    differences: Vec<f64>,
    max_abs_difference: f64,
    monotone: i32,
    termination: Termination,
    arclength: f64,
}

pub fn cmd_poincare(sc: &Scenario, out: &Path) -> Result<(), CliError> {
    let sec = section(&sc.poincare, "poincare")?;
    let s = sc.surface()?;
    let umbilics = locate_umbilics(&s, &sec.umbilics)?;
    let opts = sec
        .integrator
        .options(umbilics.iter().map(|u| u.location).collect(), Some(sec.bounds));
    let ray = Ray::new(sec.ray).map_err(|e| CliError::from_core("ray", e))?;
    let res = poincare_returns(&s, ray, sec.start, sec.branch, sec.returns, &opts)
        .map_err(|e| CliError::from_core("poincare trace", e))?;

    let differences: Vec<f64> = res.returns.windows(2).map(|w| w[1] - w[0]).collect();
    let max_abs = differences.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let rows = res.returns.iter().zip(&res.points).enumerate().map(|(k, (r, p))| {
        vec![k.to_string(), num(*r), num(p[0]), num(p[1])]
    });
    write_atomic(out, "poincare.csv", &to_csv(&["k", "distance", "x", "y"], rows))?;
    let trace_rows = res
        .trace
        .points
        .iter()
        .enumerate()
        .map(|(seq, p)| vec!["0".to_string(), seq.to_string(), num(p[0]), num(p[1])]);
    write_atomic(out, "poincare_trace.csv", &to_csv(&["trace_id", "seq", "x", "y"], trace_rows))?;
    write_atomic(
        out,
        "poincare.json",
        &to_json(&PoincareFile {
            scenario: &sc.name,
            ray: ray.direction,
            start: sec.start,
            branch: sec.branch,
            requested: sec.returns,
            returns: &res.returns,
            differences,
            max_abs_difference: max_abs,
            monotone: monotonicity(&res.returns),
            termination: res.termination,
            arclength: res.trace.arclength,
        }),
    )?;
    let mut plot = Plot::new(sec.bounds, true);
    plot.polyline(&res.trace.points, "#2e8b3a", 0.5);
    let far = (sec.bounds[1] - sec.bounds[0]).hypot(sec.bounds[3] - sec.bounds[2]);
    plot.polyline(&[[0.0, 0.0], [far * ray.direction[0], far * ray.direction[1]]], "#888888", 1.0);
    for p in &res.points {
        plot.dot(*p, 2.5, "#c03020");
    }
    for u in &umbilics {
        plot.dot(u.location, 5.0, "black");
    }
    write_atomic(out, "poincare.svg", plot.finish(&format!("{}: returns to the ray", sc.name)).as_bytes())?;
    if res.returns.len() < sec.returns {
        return Err(CliError::Numerical(format!(
            "only {} of {} returns before the trace stopped ({})",
            res.returns.len(),
            sec.returns,
            res.termination
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct ScanStep {
    value: f64,
    index: Option<HalfIndex>,
    error: Option<String>,
    umbilics: Vec<UmbilicRecord>,
}

#[derive(Serialize)]
struct Jump {
    lo: f64,
    hi: f64,
    estimate: f64,
    from: HalfIndex,
    to: HalfIndex,
    /// Set when an evaluation inside the bracket failed.
    unresolved: bool,
}

#[derive(Serialize)]
struct ScanFile<'a> {
    scenario: &'a str,
    parameter: String,
    index_circle: Circle,
    steps: &'a [ScanStep],
    jumps: &'a [Jump],
}

pub fn cmd_scan(sc: &Scenario, out: &Path) -> Result<(), CliError> {
    let sec = section(&sc.scan, "scan")?;
    let base = sc.surface()?;
    if sec.steps < 2 || !(sec.range[0] < sec.range[1]) || !(sec.bisect_tol > 0.0) {
        return Err(CliError::Input(
            "scan needs at least 2 steps, an increasing range and a positive bisect_tol".into(),
        ));
    }
    let opts = SamplingOptions::from(sec.sampling);
    let circle = sec.index_circle;
    let index_for = |v: f64| -> Result<HalfIndex, String> {
        let s = sec.parameter.apply(&base, v).map_err(|e| e.to_string())?;
        index_at_with(&s, circle.center, circle.radius, &opts)
            .map(|r| r.index)
            .map_err(|e| e.to_string())
    };
    let values: Vec<f64> = (0..sec.steps)
        .map(|k| {
            let t = k as f64 / (sec.steps - 1) as f64;
            sec.range[0] + t * (sec.range[1] - sec.range[0])
        })
        .collect();
    let steps: Vec<ScanStep> = values
        .par_iter()
        .map(|&value| -> Result<ScanStep, CliError> {
            let s = sec.parameter.apply(&base, value)?;
            let umbilics = locate_umbilics(&s, &sec.umbilics)?;
            let (index, error) = match index_for(value) {
                Ok(i) => (Some(i), None),
                Err(e) => (None, Some(e)),
            };
            Ok(ScanStep {
                value,
                index,
                error,
                umbilics,
            })
        })
        .collect::<Result<_, _>>()?;

    let valid: Vec<(f64, HalfIndex)> =
        steps.iter().filter_map(|s| s.index.map(|i| (s.value, i))).collect();
    let brackets: Vec<((f64, HalfIndex), (f64, HalfIndex))> = valid
        .windows(2)
        .filter(|w| w[0].1 != w[1].1)
        .map(|w| (w[0], w[1]))
        .collect();
    let jumps: Vec<Jump> = brackets
        .par_iter()
        .map(|&((mut lo, from), (mut hi, to))| {
            let mut unresolved = false;
            while hi - lo > sec.bisect_tol {
                let mid = 0.5 * (lo + hi);
                match index_for(mid) {
                    Ok(i) if i == from => lo = mid,
                    Ok(_) => hi = mid,
                    Err(_) => {
                        unresolved = true;
                        break;
                    }
                }
            }
            Jump {
                lo,
                hi,
                estimate: 0.5 * (lo + hi),
                from,
                to,
                unresolved,
            }
        })
        .collect();

    let rows = steps.iter().map(|s| {
        let stars = s
            .umbilics
            .iter()
            .filter(|u| u.classification == Some(umbilic_core::Classification::Star))
            .count();
        vec![
            num(s.value),
            opt_num(s.index.map(HalfIndex::value)),
            s.index.is_some().to_string(),
            s.umbilics.len().to_string(),
            stars.to_string(),
        ]
    });
    write_atomic(
        out,
        "scan.csv",
        &to_csv(&["value", "index", "valid", "umbilics", "stars"], rows),
    )?;
    write_atomic(
        out,
        "scan.json",
        &to_json(&ScanFile {
            scenario: &sc.name,
            parameter: sec.parameter.label(),
            index_circle: circle,
            steps: &steps,
            jumps: &jumps,
        }),
    )
}
