use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use umbilic_core::foliation::integrate_from;
use umbilic_core::{
    find_umbilics, integrate_both, integrate_curvature_line, make_s_d_a, poincare_returns, Branch,
    MongeSurface, Ray, Termination, Trace, TraceOptions,
};

const FIG1: [f64; 9] = [1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0];
const FIG3A: [f64; 9] = [1.0 / 28.0, 0.0, 1.0, 0.0, -1.5, 0.0, 1.0, 0.0, 1.0 / 28.0];

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn segment_distance(a: [f64; 2], b: [f64; 2], q: [f64; 2]) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len2 > 0.0 {
        (((q[0] - a[0]) * ab[0] + (q[1] - a[1]) * ab[1]) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    dist([a[0] + t * ab[0], a[1] + t * ab[1]], q)
}

fn polyline_distance(points: &[[f64; 2]], q: [f64; 2]) -> f64 {
    points
        .windows(2)
        .map(|w| segment_distance(w[0], w[1], q))
        .fold(f64::INFINITY, f64::min)
}

fn short(len: f64) -> TraceOptions {
    TraceOptions {
        max_arclength: len,
        ..TraceOptions::default()
    }
}

#[test]
fn traces_are_reversible() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..100 {
        let a: Vec<f64> = (0..9).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let s = make_s_d_a(8, &a).unwrap();
        let start = [rng.gen_range(-0.4..0.4), rng.gen_range(-0.4..0.4)];
        let branch = if rng.gen_bool(0.5) { Branch::Max } else { Branch::Min };
        let fwd = integrate_curvature_line(&s, start, branch, &short(0.02)).unwrap();
        assert_eq!(fwd.termination, Termination::StepLimit);
        let end = *fwd.points.last().unwrap();
        let back_dir = {
            let t = fwd.tangents.last().unwrap();
            [-t[0], -t[1]]
        };
        let back = integrate_from(&s, end, back_dir, branch, &short(0.025)).unwrap();
        let miss = polyline_distance(&back.points, start);
        assert!(miss < 1e-6, "{start:?}: {miss:e}");
    }
}

#[test]
fn branch_tangents_are_orthogonal() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for _ in 0..100 {
        let a: Vec<f64> = (0..9).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let s = make_s_d_a(8, &a).unwrap();
        let start = [rng.gen_range(-0.4..0.4), rng.gen_range(-0.4..0.4)];
        let max = integrate_curvature_line(&s, start, Branch::Max, &short(0.01)).unwrap();
        // Cross the max trace with a min trace at one of its interior points.
        let k = max.points.len() / 2;
        let q = max.points[k];
        let min = integrate_curvature_line(&s, q, Branch::Min, &short(0.01)).unwrap();
        let (t1, t2) = (max.tangents[k], min.tangents[0]);
        let [e, f, g] = s.eval_jet(q[0], q[1]).unwrap().metric();
        let ortho = e * t1[0] * t2[0] + f * (t1[0] * t2[1] + t2[0] * t1[1]) + g * t1[1] * t2[1];
        assert!(ortho.abs() < 1e-8, "{q:?}: {ortho:e}");
    }
}

fn fig1_lines(branch: Branch) -> Vec<Vec<[f64; 2]>> {
    let s = make_s_d_a(8, &FIG1).unwrap();
    // The min family spirals around the origin; a length cap keeps it finite.
    let opts = TraceOptions {
        bounds: Some([-0.2, 0.2, -0.2, 0.2]),
        max_arclength: 0.3,
        ..TraceOptions::default()
    };
    (0..40)
        .map(|k| {
            let t = std::f64::consts::TAU * f64::from(k) / 40.0;
            let line = integrate_both(&s, [0.1 * t.cos(), 0.1 * t.sin()], branch, &opts).unwrap();
            line.points()
        })
        .collect()
}

/// Proper crossing of two segments at an angle above `min_sin`.
fn crosses(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2], min_sin: f64) -> bool {
    let orient = |p: [f64; 2], q: [f64; 2], r: [f64; 2]| {
        (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
    };
    let (o1, o2) = (orient(a, b, c), orient(a, b, d));
    let (o3, o4) = (orient(c, d, a), orient(c, d, b));
    if !(o1 * o2 < 0.0 && o3 * o4 < 0.0) {
        return false;
    }
    let u = [b[0] - a[0], b[1] - a[1]];
    let v = [d[0] - c[0], d[1] - c[1]];
    let sin = (u[0] * v[1] - u[1] * v[0]).abs() / (u[0].hypot(u[1]) * v[0].hypot(v[1]));
    sin > min_sin
}

/// Turn between segment `k` of a polyline and its neighbours, as a sine.
fn local_turn(line: &[[f64; 2]], k: usize) -> f64 {
    let dir = |i: usize| {
        let v = [line[i + 1][0] - line[i][0], line[i + 1][1] - line[i][1]];
        let n = v[0].hypot(v[1]);
        [v[0] / n, v[1] / n]
    };
    let u = dir(k);
    let mut turn: f64 = 0.0;
    for i in [k.checked_sub(1), Some(k + 1)].into_iter().flatten() {
        if i + 1 < line.len() {
            let v = dir(i);
            turn = turn.max((u[0] * v[1] - u[1] * v[0]).abs());
        }
    }
    turn
}

#[test]
fn fig1_traces_do_not_cross() {
    // Chords of two converging lines can intersect at about the angle the
    // field turns over one step. A real crossing is steeper than that.
    for branch in [Branch::Max, Branch::Min] {
        let lines = fig1_lines(branch);
        assert_eq!(lines.len(), 40);
        for i in 0..lines.len() {
            for j in i + 1..lines.len() {
                for (k1, s1) in lines[i].windows(2).enumerate() {
                    // Traces meeting at the umbilic are not crossings.
                    if s1[0][0].hypot(s1[0][1]) < 1e-3 {
                        continue;
                    }
                    for (k2, s2) in lines[j].windows(2).enumerate() {
                        let min_sin =
                            0.02 + 2.0 * local_turn(&lines[i], k1).max(local_turn(&lines[j], k2));
                        assert!(
                            !crosses(s1[0], s1[1], s2[0], s2[1], min_sin),
                            "{branch}: traces {i} and {j} cross near {:?}",
                            s1[0]
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn fig1_traces_are_transverse_to_the_circle() {
    let s = make_s_d_a(8, &FIG1).unwrap();
    let lines = fig1_lines(Branch::Max);
    for (k, line) in lines.iter().enumerate() {
        // Each line runs from the umbilic out to the frame.
        let radii: Vec<f64> = line.iter().map(|p| p[0].hypot(p[1])).collect();
        assert!(radii.iter().cloned().fold(f64::INFINITY, f64::min) < 1e-3, "line {k}");
        assert!(radii.iter().cloned().fold(0.0, f64::max) > 0.19, "line {k}");
    }
    for branch in [Branch::Max] {
        for k in 0..40 {
            let t = std::f64::consts::TAU * f64::from(k) / 40.0;
            let p = [0.1 * t.cos(), 0.1 * t.sin()];
            let trace = integrate_curvature_line(&s, p, branch, &short(1e-3)).unwrap();
            let d = trace.tangents[0];
            let radial = (d[0] * t.cos() + d[1] * t.sin()).abs();
            assert!(radial > 0.05, "{branch} seed {k}: radial component {radial}");
        }
    }
}

fn hausdorff(a: &[[f64; 2]], b: &[[f64; 2]]) -> f64 {
    let one = |x: &[[f64; 2]], y: &[[f64; 2]]| {
        x.iter().map(|p| polyline_distance(y, *p)).fold(0.0, f64::max)
    };
    one(a, b).max(one(b, a))
}

#[test]
fn fig3_traces_respect_the_eightfold_symmetry() {
    let s = make_s_d_a(8, &FIG3A).unwrap();
    let start = [0.05, 0.02];
    let (sn, cs) = std::f64::consts::FRAC_PI_4.sin_cos();
    let rot = |p: [f64; 2]| [cs * p[0] - sn * p[1], sn * p[0] + cs * p[1]];
    for branch in [Branch::Max, Branch::Min] {
        let base = integrate_curvature_line(&s, start, branch, &short(0.1)).unwrap();
        let turned = integrate_from(&s, rot(start), rot(base.tangents[0]), branch, &short(0.1)).unwrap();
        let mapped: Vec<[f64; 2]> = base.points.iter().map(|p| rot(*p)).collect();
        let h = hausdorff(&mapped, &turned.points);
        assert!(h < 1e-5, "{branch}: {h:e}");
    }
}

fn fig6a(lambda: f64) -> MongeSurface {
    MongeSurface::paraboloid([0.5 - lambda, 0.0, 0.5 + lambda], [], 3.0).unwrap()
}

fn fig6b(lambda: f64) -> MongeSurface {
    MongeSurface::paraboloid(
        [0.5 + lambda, 0.0, 0.5 - lambda],
        [(3, 0, -0.002), (2, 1, 0.002), (1, 2, 0.001), (0, 3, -0.001)],
        3.0,
    )
    .unwrap()
}

#[test]
fn fig6a_axis_line_connects_the_umbilics() {
    let s = fig6a(-0.01);
    let umbilics: Vec<[f64; 2]> = find_umbilics(&s, 1.0, 24, 1e-9)
        .unwrap()
        .into_iter()
        .map(|r| r.location)
        .collect();
    assert_eq!(umbilics.len(), 2);
    let opts = TraceOptions {
        umbilics: umbilics.clone(),
        ..TraceOptions::default()
    };
    let line = integrate_both(&s, [0.0, 0.0], Branch::Max, &opts).unwrap();
    let ends = [line.forward.points.last().unwrap(), line.backward.as_ref().unwrap().points.last().unwrap()];
    assert_eq!(line.forward.termination, Termination::NearUmbilic);
    assert_eq!(line.backward.as_ref().unwrap().termination, Termination::NearUmbilic);
    for u in &umbilics {
        assert!(ends.iter().any(|e| dist(**e, *u) < 1e-3), "{u:?} not reached");
    }
}

#[test]
fn fig6a_center_lines_are_closed() {
    let s = fig6a(0.0);
    let ray = Ray::new([0.0, -1.0]).unwrap();
    let r = poincare_returns(&s, ray, [0.0, -0.1], Branch::Max, 20, &TraceOptions::default()).unwrap();
    assert_eq!(r.returns.len(), 20);
    let (lo, hi) = r.returns.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(*v), h.max(*v)));
    assert!(hi - lo < 1e-8, "spread {:e}", hi - lo);
}

#[test]
fn fig6b_center_line_spirals() {
    let s = fig6b(0.0);
    let ray = Ray::new([0.0, -1.0]).unwrap();
    let r = poincare_returns(&s, ray, [0.0, -0.1], Branch::Max, 20, &TraceOptions::default()).unwrap();
    assert_eq!(r.returns.len(), 20);
    let diffs: Vec<f64> = r.returns.windows(2).map(|w| w[1] - w[0]).collect();
    assert!(diffs.iter().all(|d| *d < 0.0) || diffs.iter().all(|d| *d > 0.0), "{diffs:?}");
}

#[test]
fn closed_trace_metadata() {
    let s = fig6a(0.0);
    let t: Trace = integrate_curvature_line(&s, [0.3, 0.0], Branch::Max, &TraceOptions::default()).unwrap();
    assert_eq!(t.termination, Termination::Closed);
    assert_eq!(t.points.first(), t.points.last());
    assert_eq!(t.points.len(), t.tangents.len());
    for w in t.points.windows(2) {
        assert!(dist(w[0], w[1]) < 2.0 * 1e-3);
    }
}
