//! Exit criteria. Prints one line per criterion and fails if any is red.
//!
//! Criteria 11 and 12 run the shipped scenario files through the binary.

use std::path::{Path, PathBuf};
use std::process::Command;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use umbilic_core::monge_reduce::j_of;
use umbilic_core::umbilic::enrich;
use umbilic_core::{
    berry_hannay_j, find_umbilics, index_at, make_s_d_a, monge_at_umbilic, paraboloid_umbilics,
    quad_at, truncated_coeffs, HalfIndex, MongeSurface, UmbilicRecord,
};
use umbilic_oracles::regraph;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn index(s: &MongeSurface, center: [f64; 2], r: f64) -> Result<HalfIndex, String> {
    index_at(s, center, r).map(|rep| rep.index).map_err(e)
}

fn sum_halves(recs: &[UmbilicRecord]) -> Option<i32> {
    recs.iter().map(|r| r.index.map(HalfIndex::halves)).sum()
}

fn sphere_degeneracy() -> Outcome {
    let s = MongeSurface::sphere(0.9).map_err(e)?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let r = 0.5 * rng.gen::<f64>().sqrt();
        let t = rng.gen_range(0.0..std::f64::consts::TAU);
        worst = worst.max(quad_at(&s, r * t.cos(), r * t.sin()).map_err(e)?.max_abs());
    }
    check(worst < 1e-13, format!("largest coefficient {worst:.3e}"))
}

fn revolution() -> Outcome {
    let terms = [(8, 0, 1.0), (6, 2, 4.0), (4, 4, 6.0), (2, 6, 4.0), (0, 8, 1.0)];
    let s = MongeSurface::new(true, [0.0; 3], terms, 0.9).map_err(e)?;
    let i = index(&s, [0.0, 0.0], 0.1)?;
    check(i.halves() == 2, format!("index {i}"))
}

const FIG1: [f64; 9] = [1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0];

fn figure1() -> Outcome {
    let i = index(&make_s_d_a(8, &FIG1).map_err(e)?, [0.0, 0.0], 0.1)?;
    let neg: Vec<f64> = FIG1.iter().map(|v| -v).collect();
    let j = index(&make_s_d_a(8, &neg).map_err(e)?, [0.0, 0.0], 0.1)?;
    check(i.halves() == 2, format!("index {i}; negated coefficients give {j}"))
}

fn figure2() -> Outcome {
    let s = make_s_d_a(8, &[1.0 / 28.0, 0.0, 0.987143, 0.0, 0.0, 0.0, 2.0, 0.0, 1.0]).map_err(e)?;
    let inner = index(&s, [0.0, 0.0], 0.08)?;
    let outer = index(&s, [0.0, 0.0], 0.12)?;
    let mut recs = find_umbilics(&s, 0.2, 64, 1e-9).map_err(e)?;
    enrich(&s, &mut recs, 0.005);
    let placed = recs.len() == 2
        && recs.iter().any(|r| r.location[0] > 0.0)
        && recs.iter().any(|r| r.location[0] < 0.0)
        && recs
            .iter()
            .all(|r| r.location[1].abs() < 1e-9 && (r.location[0].abs() - 0.1).abs() < 0.02);
    let stars = recs
        .iter()
        .all(|r| r.index.map(HalfIndex::halves) == Some(-1) && r.j.is_some_and(|j| j < 0.0));
    let identity = sum_halves(&recs).map(|h| inner.halves() + h) == Some(outer.halves());
    check(
        inner.halves() == 2 && outer.halves() == 0 && placed && stars && identity,
        format!(
            "inner {inner}, outer {outer}, umbilics {:?}, J {:?}",
            recs.iter().map(|r| r.location).collect::<Vec<_>>(),
            recs.iter().map(|r| r.j).collect::<Vec<_>>()
        ),
    )
}

fn figure3() -> Outcome {
    let a0 = 1.0 / 28.0;
    let s3a = make_s_d_a(8, &[a0, 0.0, 1.0, 0.0, -1.5, 0.0, 1.0, 0.0, a0]).map_err(e)?;
    let i3a = index(&s3a, [0.0, 0.0], 0.1)?;
    let s = make_s_d_a(8, &[0.03583, 0.0, 1.0, 0.0, -1.498, 0.0, 1.0, 0.0, 0.03583]).map_err(e)?;
    let inner = index(&s, [0.0, 0.0], 0.03)?;
    let outer = index(&s, [0.0, 0.0], 0.1)?;
    let mut recs = find_umbilics(&s, 0.2, 64, 1e-9).map_err(e)?;
    enrich(&s, &mut recs, 0.005);
    let stars = recs.len() == 8
        && recs.iter().all(|r| {
            let rad = r.location[0].hypot(r.location[1]);
            (rad - 0.05).abs() < 0.01
                && r.j.is_some_and(|j| j < 0.0)
                && r.index.map(HalfIndex::halves) == Some(-1)
        });
    let identity = sum_halves(&recs).map(|h| inner.halves() + h) == Some(outer.halves());
    check(
        i3a.halves() == -6 && inner.halves() == 2 && outer.halves() == -6 && stars && identity,
        format!("fig 3a {i3a}; fig 3b inner {inner}, outer {outer}, {} umbilics", recs.len()),
    )
}

fn index_bounds() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut valid, mut bad) = (0, Vec::new());
    for _ in 0..100 {
        let a: Vec<f64> = (0..9).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let s = make_s_d_a(8, &a).map_err(e)?;
        if let Ok(rep) = index_at(&s, [0.0, 0.0], 0.01) {
            if !rep.valid {
                continue;
            }
            valid += 1;
            let h = rep.index.halves();
            if h % 2 != 0 || !(-6..=6).contains(&h) {
                bad.push(rep.index.to_string());
            }
        }
    }
    check(valid > 0 && bad.is_empty(), format!("{valid} valid contours, violations {bad:?}"))
}

fn emerging_stars() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for d in [4u32, 6, 8] {
        let df = f64::from(d);
        let mut a = vec![0.0; d as usize + 1];
        a[0] = 1.0 / 28.0;
        a[2] = (1.0 - 1e-3) * df * (df - 1.0) * a[0] / 2.0;
        let s = make_s_d_a(d, &a).map_err(e)?;
        let mut recs: Vec<UmbilicRecord> = find_umbilics(&s, 0.2, 64, 1e-9)
            .map_err(e)?
            .into_iter()
            .filter(|r| r.location[1].abs() < 1e-9)
            .collect();
        enrich(&s, &mut recs, 0.005);
        ok &= !recs.is_empty()
            && recs.iter().all(|r| {
                r.j.is_some_and(|j| j < 0.0) && r.index.map(HalfIndex::halves) == Some(-1)
            });
        notes.push(format!("d={d}: {} on the x-axis", recs.len()));
    }
    check(ok, notes.join(", "))
}

fn truncation() -> Outcome {
    let s = make_s_d_a(8, &FIG1).map_err(e)?;
    let t = truncated_coeffs(8, &FIG1).map_err(e)?;
    let err = |r: f64| -> Result<[f64; 3], String> {
        let mut out = [0.0f64; 3];
        for k in 0..720 {
            let th = std::f64::consts::TAU * f64::from(k) / 720.0;
            let (c, sn) = (th.cos(), th.sin());
            let q = quad_at(&s, r * c, r * sn).map_err(e)?;
            let bar = t.eval(c, sn);
            let f = r.powi(-6);
            for (o, (v, b)) in out.iter_mut().zip([(q.c_uu, bar[0]), (q.c_uv, bar[1]), (q.c_vv, bar[2])]) {
                *o = o.max((f * v - b).abs());
            }
        }
        Ok(out)
    };
    let (coarse, fine) = (err(1e-2)?, err(1e-3)?);
    let ratios: Vec<f64> = coarse.iter().zip(fine).map(|(c, f)| c / f).collect();
    check(ratios.iter().all(|&q| q >= 8.0), format!("reduction factors {ratios:.1?}"))
}

fn monge_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut cases = Vec::new();
    while cases.len() < 20 {
        let a: Vec<f64> = (0..9).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let s = make_s_d_a(8, &a).map_err(e)?;
        if let Some(rec) = find_umbilics(&s, 0.4, 24, 1e-9).map_err(e)?.first() {
            cases.push((s, rec.location));
        }
    }
    let (mut worst, mut sign_ok) = (0.0f64, true);
    for (s, chi) in &cases {
        let m = monge_at_umbilic(s, *chi).map_err(e)?;
        let g = regraph(s, *chi, &m.frame.rotation, 1e-3);
        let q_err = m
            .quadratic
            .iter()
            .zip(g.quadratic)
            .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()))
            / m.k.abs();
        let cubic = m.cubic_coefficients();
        let scale = cubic.iter().fold(0.0f64, |acc, c| acc.max(c.abs()));
        let c_err = cubic
            .iter()
            .zip(g.cubic)
            .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()))
            / scale;
        worst = worst.max(q_err).max(c_err);
        let [c30, c21, c12, c03] = g.cubic;
        let j_oracle = j_of(6.0 * c30, 2.0 * c21, 2.0 * c12, 6.0 * c03);
        sign_ok &= j_oracle.signum() == berry_hannay_j(&m).signum();
    }
    check(worst < 1e-5 && sign_ok, format!("worst relative error {worst:.2e}, J signs agree: {sign_ok}"))
}

fn paraboloid() -> Outcome {
    let got = paraboloid_umbilics(0.4, 0.0, 0.5).map_err(e)?;
    let expected = [[-0.559017, 0.0], [0.559017, 0.0]];
    let located = got.len() == 2
        && expected.iter().all(|p| {
            got.iter().any(|q| (q[0] - p[0]).abs() < 1e-8 && (q[1] - p[1]).abs() < 1e-8)
        });
    // Sweep a through c = 0.5: the pair must change axes.
    let on_axis = |a: f64| -> Result<(bool, bool), String> {
        let s = MongeSurface::paraboloid([a, 0.0, 0.5], [], 1.0).map_err(e)?;
        let found = find_umbilics(&s, 0.9, 32, 1e-9).map_err(e)?;
        Ok((
            found.len() == 2 && found.iter().all(|r| r.location[1].abs() < 1e-9),
            found.len() == 2 && found.iter().all(|r| r.location[0].abs() < 1e-9),
        ))
    };
    let below = on_axis(0.45)?;
    let above = on_axis(0.55)?;
    let exchange = (below.0 && above.1) || (below.1 && above.0);
    check(
        located && exchange,
        format!(
            "closed form gives {got:?} (expected +-0.559017 on the x-axis: {}); axis exchange: {}",
            if located { "ok" } else { "MISMATCH" },
            if exchange { "ok" } else { "MISSING" }
        ),
    )
}

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_umbilic-lab")
}

fn scenario_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn run_cli(command: &str, scenario: &Path, out: &Path) -> Result<(), String> {
    let status = Command::new(bin())
        .args([command, "--scenario"])
        .arg(scenario)
        .arg("--out")
        .arg(out)
        .output()
        .map_err(e)?;
    if status.status.success() {
        Ok(())
    } else {
        Err(format!(
            "{command} {}: {}",
            scenario.display(),
            String::from_utf8_lossy(&status.stderr).trim()
        ))
    }
}

fn poincare_json(name: &str, out: &Path) -> Result<serde_json::Value, String> {
    run_cli("poincare", &scenario_dir().join(format!("{name}.json")), out)?;
    let text = std::fs::read_to_string(out.join("poincare.json")).map_err(e)?;
    serde_json::from_str(&text).map_err(e)
}

fn figure6() -> Outcome {
    let tmp = tempfile::tempdir().map_err(e)?;
    let sym = poincare_json("fig6a_lambda0", &tmp.path().join("a"))?;
    let cub = poincare_json("fig6b_lambda0", &tmp.path().join("b"))?;
    let values = |v: &serde_json::Value| -> Vec<f64> {
        v["returns"].as_array().map_or_else(Vec::new, |a| a.iter().filter_map(|x| x.as_f64()).collect())
    };
    let (rs, rc) = (values(&sym), values(&cub));
    let spread = rs.iter().fold(0.0f64, |m, r| m.max((r - rs[0]).abs()));
    let constant = rs.len() == 20 && spread < 1e-8;
    let inc = rc.windows(2).all(|w| w[1] > w[0]);
    let dec = rc.windows(2).all(|w| w[1] < w[0]);
    let spiral = rc.len() == 20 && (inc || dec);
    check(
        constant && spiral,
        format!(
            "symmetric spread {spread:.1e} over {} returns; perturbed drift {:.3e} per return over {} returns",
            rs.len(),
            (rc.last().unwrap_or(&0.0) - rc.first().unwrap_or(&0.0)) / (rc.len().max(2) - 1) as f64,
            rc.len()
        ),
    )
}

const COMMANDS: [&str; 5] = ["index", "umbilics", "foliation", "poincare", "scan"];

fn run_all(out: &Path) -> Result<usize, String> {
    let mut runs = 0;
    let mut names: Vec<PathBuf> = std::fs::read_dir(scenario_dir())
        .map_err(e)?
        .filter_map(|d| d.ok().map(|d| d.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    names.sort();
    for path in names {
        let sc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).map_err(e)?).map_err(e)?;
        let stem = path.file_stem().unwrap().to_string_lossy().to_string();
        for cmd in COMMANDS {
            if !sc[cmd].is_null() {
                run_cli(cmd, &path, &out.join(&stem).join(cmd))?;
                runs += 1;
            }
        }
    }
    Ok(runs)
}

fn files(root: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).into_iter().flatten().flatten() {
            let p = entry.path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push(p.strip_prefix(root).unwrap().to_path_buf());
            }
        }
    }
    out.sort();
    out
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(e)?;
    let (a, b) = (tmp.path().join("first"), tmp.path().join("second"));
    let runs = run_all(&a)?;
    run_all(&b)?;
    let (fa, fb) = (files(&a), files(&b));
    let data: Vec<&PathBuf> = fa
        .iter()
        .filter(|p| p.extension().is_some_and(|x| x == "csv" || x == "json"))
        .collect();
    let differing: Vec<String> = fa
        .iter()
        .filter(|p| std::fs::read(a.join(p)).ok() != std::fs::read(b.join(p)).ok())
        .map(|p| p.display().to_string())
        .collect();
    check(
        fa == fb && differing.is_empty() && !data.is_empty(),
        format!("{runs} command runs, {} data files, differing {differing:?}", data.len()),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("sphere degeneracy", sphere_degeneracy),
        ("surface of revolution index", revolution),
        ("figure 1 index", figure1),
        ("figure 2 merger and stars", figure2),
        ("figure 3 index jump", figure3),
        ("index bounds", index_bounds),
        ("emerging umbilics are stars", emerging_stars),
        ("truncation convergence", truncation),
        ("Monge reduction oracle", monge_oracle),
        ("paraboloid closed forms", paraboloid),
        ("figure 6 return maps", figure6),
        ("determinism", determinism),
    ];
    let mut failed = Vec::new();
    for (k, (name, f)) in criteria.iter().enumerate() {
        let n = k + 1;
        match f() {
            Ok(detail) => println!("criterion {n:2} PASS  {name}: {detail}"),
            Err(detail) => {
                println!("criterion {n:2} FAIL  {name}: {detail}");
                failed.push(n);
            }
        }
    }
    if failed.is_empty() {
        println!("all {} criteria pass", criteria.len());
    } else {
        println!("failing criteria: {failed:?}");
        std::process::exit(1);
    }
}
