//! End-to-end acceptance checks. Runs without the libtest harness so that
//! every criterion prints one PASS/FAIL line; exits non-zero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use paraclose::generate::{bounded_treewidth_dag, rng, semiorder, sp_tree, width2_poset, Rng64};
use paraclose::parametric::{maximize_quasiconvex, parametric_profile, Objective, Rational};
use paraclose::polygon::{hull_of_plain_points, hull_of_points, hull_union, minkowski_sum};
use paraclose::semiorder::{solve_semiorder, solve_semiorder_with, SemiItem, Semiorder};
use paraclose::series_parallel::{solve_sp, solve_sp_with};
use paraclose::treewidth::{build_formula, greedy_tree_decomposition, height_bound, solve_treewidth};
use paraclose::width::solve_width2;
use paraclose::{ConvexPolygon, ParamWeight, Point, SplayPolygon, WeightedPoset, Witness};
use rand::Rng;

const ORACLE_LIMIT: usize = 20;
const WEIGHT: i64 = 9;
/// Weight range for the scaling criteria.
const BIG_WEIGHT: i64 = paraclose::poset::WEIGHT_LIMIT;

const SEMI_INSTANCES: usize = 300;
const SEMI_TIME: Duration = Duration::from_secs(30);
const SP_INSTANCES: usize = 300;
const SP_TIME: Duration = Duration::from_secs(30);
const TW_INSTANCES: usize = 200;
const TW_TIME: Duration = Duration::from_secs(60);
const TW_MAX_WIDTH: usize = 3;
const W2_INSTANCES: usize = 300;
const W2_TIME: Duration = Duration::from_secs(30);
const MAX_N: usize = 14;
const TW_MAX_N: usize = 12;
/// Larger treewidth instances used only for the height check.
const TW_HEIGHT_EXTRA: usize = 60;
const TW_HEIGHT_MAX_N: usize = 24;

const SP_BOUND_SIZES: [usize; 3] = [1_000, 10_000, 100_000];
const SP_BIG_TIME: Duration = Duration::from_secs(5);
const SP_SLOPE: (f64, f64) = (0.95, 1.25);
const SP_SCALING_EXP: std::ops::RangeInclusive<u32> = 10..=17;

const SEMI_SCALING_EXP: std::ops::RangeInclusive<u32> = 8..=15;
const SEMI_SLOPE_MAX: f64 = 1.1;
/// Bound on `count(ℓ) · ℓ / n'` for subdivided squares of side ℓ.
const SUBDIVISION_CONST: f64 = 8.0;

const SPLAY_OPS: usize = 1000;
const SPLAY_MAX_SIZE: usize = 64;

const LAMBDA_SAMPLES: usize = 20;

const KERNEL_PAIRS: usize = 10_000;
const KERNEL_MAX_SIZE: usize = 50;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: String) -> Outcome {
    Outcome { ok, detail }
}

/// Per-instance checks shared by criteria 1 to 4, and the parametric checks
/// of criterion 10 on the same instance.
#[derive(Default)]
struct Tally {
    instances: usize,
    mismatches: Vec<String>,
    witness_errors: usize,
}

#[derive(Default)]
struct ParamTally {
    instances: usize,
    lambdas: usize,
    failures: Vec<String>,
}

fn brute_points(p: &WeightedPoset) -> Vec<Point> {
    p.enumerate_lower_sets(ORACLE_LIMIT).unwrap().iter().map(|s| p.project(&s.members).unwrap()).collect()
}

fn check_witnesses(p: &WeightedPoset, poly: &ConvexPolygon) -> bool {
    (0..poly.len()).all(|i| {
        let w = poly.witness(i).expect("solver output carries witnesses").expand();
        p.is_lower_set(&w) && p.project(&w).unwrap() == poly.vertices()[i]
    })
}

fn check_instance(tally: &mut Tally, label: &str, p: &WeightedPoset, poly: &ConvexPolygon) {
    tally.instances += 1;
    let oracle = p.oracle_polygon(ORACLE_LIMIT).unwrap();
    if oracle != *poly {
        tally.mismatches.push(format!("{label}: solver {:?} oracle {:?}", poly.vertices(), oracle.vertices()));
    }
    if !check_witnesses(p, poly) {
        tally.witness_errors += 1;
    }
}

fn lin(v: Point, l: Rational) -> Rational {
    l * Rational::from_integer(v.x as i128) + Rational::from_integer(v.y as i128)
}

fn check_profile(t: &mut ParamTally, r: &mut Rng64, label: &str, p: &WeightedPoset, poly: &ConvexPolygon) {
    t.instances += 1;
    let pts = brute_points(p);
    let prof = parametric_profile(poly).unwrap();
    let mut lambdas: Vec<Rational> =
        (0..LAMBDA_SAMPLES).map(|_| Rational::new(r.gen_range(-200..=200), r.gen_range(1..=12))).collect();
    lambdas.extend(prof.breakpoints.windows(2).map(|w| (w[0] + w[1]) / 2));
    if let (Some(&first), Some(&last)) = (prof.breakpoints.first(), prof.breakpoints.last()) {
        lambdas.push(first - 1);
        lambdas.push(last + 1);
    }
    for l in lambdas {
        t.lambdas += 1;
        let best = pts.iter().map(|&v| lin(v, l)).max().unwrap();
        let got = prof.optimum_at(l);
        if prof.value_at(l) != best || lin(got.vertex, l) != best {
            t.failures.push(format!("{label}: λ = {l}"));
            return;
        }
    }
}

/// Ratio objective on a copy of the instance whose y weights are all
/// positive, so that `x / y` is defined and quasiconvex off the empty set.
fn check_ratio(t: &mut ParamTally, label: &str, p: &WeightedPoset, poly: &ConvexPolygon) {
    let best = brute_points(p).into_iter().filter_map(|v| Objective::Ratio.eval(v)).max();
    let got = maximize_quasiconvex(poly, |v| Objective::Ratio.eval(v)).ok();
    if best != got.as_ref().map(|o| o.value) {
        t.failures.push(format!("{label}: ratio {got:?} vs brute force {best:?}", got = got.map(|o| o.value)));
    }
}

fn positive_y(w: ParamWeight) -> ParamWeight {
    ParamWeight::new(w.a, w.b.abs() + 1)
}

fn reweighted(p: &WeightedPoset) -> WeightedPoset {
    WeightedPoset::from_parts(p.ids().to_vec(), p.weights().iter().map(|&w| positive_y(w)).collect(), p.covers()).unwrap()
}

fn oracle_summary(t: &Tally, elapsed: Duration, limit: Duration) -> Outcome {
    let ok = t.mismatches.is_empty() && t.witness_errors == 0 && elapsed < limit;
    let mut d = format!(
        "{}/{} match oracle, {} witness errors, {:.2} s (limit {} s)",
        t.instances - t.mismatches.len(),
        t.instances,
        t.witness_errors,
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    if let Some(m) = t.mismatches.first() {
        d += &format!("; first mismatch {m}");
    }
    outcome(ok, d)
}

fn criterion_semiorder(pt: &mut ParamTally) -> Outcome {
    let mut r = rng(0x5e41);
    let mut t = Tally::default();
    let start = Instant::now();
    for k in 0..SEMI_INSTANCES {
        let n = 1 + k % MAX_N;
        let s = semiorder(&mut r, n, WEIGHT, 3);
        let p = s.to_poset().unwrap();
        let poly = solve_semiorder(&s);
        check_instance(&mut t, &format!("semiorder #{k}"), &p, &poly);
        check_profile(pt, &mut r, &format!("semiorder #{k}"), &p, &poly);
        let items = s.items().iter().map(|it| SemiItem { weight: positive_y(it.weight), ..it.clone() }).collect();
        let s2 = Semiorder::new(items).unwrap();
        check_ratio(pt, &format!("semiorder #{k}"), &s2.to_poset().unwrap(), &solve_semiorder(&s2));
    }
    oracle_summary(&t, start.elapsed(), SEMI_TIME)
}

fn criterion_sp(pt: &mut ParamTally) -> Outcome {
    let mut r = rng(0x5e42);
    let mut t = Tally::default();
    let start = Instant::now();
    for k in 0..SP_INSTANCES {
        let n = 1 + k % MAX_N;
        let tree = sp_tree(&mut r, n, WEIGHT);
        let p = tree.to_poset().unwrap();
        let poly = solve_sp(&tree).unwrap();
        check_instance(&mut t, &format!("sp #{k}"), &p, &poly);
        check_profile(pt, &mut r, &format!("sp #{k}"), &p, &poly);
        let t2 = tree.map_weights(positive_y).unwrap();
        check_ratio(pt, &format!("sp #{k}"), &t2.to_poset().unwrap(), &solve_sp(&t2).unwrap());
    }
    oracle_summary(&t, start.elapsed(), SP_TIME)
}

fn criterion_treewidth(pt: &mut ParamTally, heights: &mut Vec<(usize, usize, usize)>) -> Outcome {
    let mut r = rng(0x5e43);
    let mut t = Tally::default();
    let start = Instant::now();
    let mut widths = [0usize; TW_MAX_WIDTH + 1];
    for k in 0..TW_INSTANCES {
        let n = 1 + k % TW_MAX_N;
        let ktree = 1 + k % TW_MAX_WIDTH;
        let p = bounded_treewidth_dag(&mut r, n, ktree, WEIGHT, TW_MAX_WIDTH);
        let td = greedy_tree_decomposition(&p);
        widths[td.width()] += 1;
        let poly = solve_treewidth(&p, &td).unwrap();
        heights.push((td.width(), n, build_formula(&p, &td).unwrap().height()));
        check_instance(&mut t, &format!("treewidth #{k}"), &p, &poly);
        check_profile(pt, &mut r, &format!("treewidth #{k}"), &p, &poly);
        let p2 = reweighted(&p);
        check_ratio(pt, &format!("treewidth #{k}"), &p2, &solve_treewidth(&p2, &td).unwrap());
    }
    let mut o = oracle_summary(&t, start.elapsed(), TW_TIME);
    o.detail += &format!("; heuristic widths 0..=3: {widths:?}");
    o
}

fn criterion_width2(pt: &mut ParamTally) -> Outcome {
    let mut r = rng(0x5e44);
    let mut t = Tally::default();
    let start = Instant::now();
    for k in 0..W2_INSTANCES {
        let n = 1 + k % MAX_N;
        let q = r.gen_range(0.05..0.6);
        let p = width2_poset(&mut r, n, WEIGHT, q);
        let poly = solve_width2(&p).unwrap();
        check_instance(&mut t, &format!("width2 #{k}"), &p, &poly);
        check_profile(pt, &mut r, &format!("width2 #{k}"), &p, &poly);
        let p2 = reweighted(&p);
        check_ratio(pt, &format!("width2 #{k}"), &p2, &solve_width2(&p2).unwrap());
    }
    oracle_summary(&t, start.elapsed(), W2_TIME)
}

fn criterion_sp_vertex_bound() -> Outcome {
    let mut r = rng(0x5e45);
    let mut parts = Vec::new();
    let mut ok = true;
    for n in SP_BOUND_SIZES {
        let tree = sp_tree(&mut r, n, BIG_WEIGHT);
        let (poly, _) = solve_sp_with(&tree, false).unwrap();
        ok &= poly.len() <= 2 * n;
        parts.push(format!("n={n}: {} vertices (bound {})", poly.len(), 2 * n));
    }
    outcome(ok, parts.join(", "))
}

/// Least-squares slope of `ln y` against `ln x`.
fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let m = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / m, ly.iter().sum::<f64>() / m);
    let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}

fn criterion_sp_scaling() -> Outcome {
    let mut r = rng(0x5e46);
    let tree = sp_tree(&mut r, 100_000, BIG_WEIGHT);
    let start = Instant::now();
    solve_sp(&tree).unwrap();
    let big = start.elapsed();

    let (mut ns, mut steps) = (Vec::new(), Vec::new());
    let mut c: f64 = 0.0;
    for e in SP_SCALING_EXP {
        let n = 1usize << e;
        let tree = sp_tree(&mut r, n, BIG_WEIGHT);
        let (_, stats) = solve_sp_with(&tree, true).unwrap();
        let s = stats.splay.rotations.max(1) as f64;
        c = c.max(s / (n as f64 * (n as f64).log2()));
        ns.push(n as f64);
        steps.push(s);
    }
    let slope = loglog_slope(&ns, &steps);
    let ok = big < SP_BIG_TIME && (SP_SLOPE.0..=SP_SLOPE.1).contains(&slope);
    outcome(
        ok,
        format!(
            "n=1e5 in {:.2} s (limit {} s); splay steps ≤ {c:.3}·n·log2 n; log-log slope {slope:.3} (allowed [{}, {}])",
            big.as_secs_f64(),
            SP_BIG_TIME.as_secs(),
            SP_SLOPE.0,
            SP_SLOPE.1
        ),
    )
}

fn criterion_semiorder_scaling() -> Outcome {
    let mut r = rng(0x5e47);
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    let mut c: f64 = 0.0;
    let mut worst_sub: f64 = 0.0;
    let mut counts = Vec::new();
    for e in SEMI_SCALING_EXP {
        let n = 1usize << e;
        let s = semiorder(&mut r, n, BIG_WEIGHT, (n as i64 / 16).max(3));
        let (poly, stats) = solve_semiorder_with(&s, false);
        let nlogn = n as f64 * (n as f64).log2();
        c = c.max(poly.len() as f64 / nlogn);
        worst_sub = worst_sub.max(stats.max_subdivision_ratio());
        counts.push(poly.len());
        xs.push(nlogn);
        ys.push(poly.len().max(1) as f64);
    }
    let slope = loglog_slope(&xs, &ys);
    let ok = slope <= SEMI_SLOPE_MAX && worst_sub <= SUBDIVISION_CONST;
    outcome(
        ok,
        format!(
            "vertices {counts:?} ≤ {c:.4}·n·log2 n; slope vs n log n {slope:.3} (max {SEMI_SLOPE_MAX}); \
             subdivided squares ≤ {worst_sub:.2}·n/ℓ (max {SUBDIVISION_CONST})"
        ),
    )
}

fn criterion_treewidth_height(heights: &mut Vec<(usize, usize, usize)>) -> Outcome {
    let mut r = rng(0x5e48);
    for k in 0..TW_HEIGHT_EXTRA {
        let n = TW_MAX_N + 1 + k % (TW_HEIGHT_MAX_N - TW_MAX_N);
        let k = r.gen_range(1..=TW_MAX_WIDTH);
        let p = bounded_treewidth_dag(&mut r, n, k, WEIGHT, TW_MAX_WIDTH);
        let td = greedy_tree_decomposition(&p);
        heights.push((td.width(), n, build_formula(&p, &td).unwrap().height()));
    }
    let violations: Vec<_> = heights.iter().filter(|&&(w, n, h)| h as f64 > height_bound(w, n)).collect();
    let worst = heights.iter().map(|&(w, n, h)| h as f64 / height_bound(w, n)).fold(0.0, f64::max);
    outcome(
        violations.is_empty(),
        format!("{} instances, {} violations, max height/bound {worst:.3}", heights.len(), violations.len()),
    )
}

fn random_polygon(r: &mut Rng64, max_size: usize, base_id: usize) -> ConvexPolygon {
    let m = r.gen_range(1..=max_size);
    let radius = r.gen_range(1..=1_000_000) as f64;
    let (cx, cy) = (r.gen_range(-1000..=1000), r.gen_range(-1000..=1000));
    let pts: Vec<(Point, Witness)> = (0..m)
        .map(|i| {
            let t: f64 = r.gen_range(0.0..std::f64::consts::TAU);
            let p = Point::new(cx + (radius * t.cos()).round() as i64, cy + (radius * t.sin()).round() as i64);
            (p, Witness::single(base_id + i))
        })
        .collect();
    hull_of_points(&pts)
}

fn criterion_splay() -> Outcome {
    let mut r = rng(0x5e49);
    let mut bad = Vec::new();
    let (mut unions, mut sums) = (0, 0);
    for k in 0..SPLAY_OPS {
        let p = random_polygon(&mut r, SPLAY_MAX_SIZE, 0);
        let q = random_polygon(&mut r, SPLAY_MAX_SIZE, 100);
        let shift = Point::new(r.gen_range(-50..=50), r.gen_range(-50..=50));
        let mut sp = SplayPolygon::from_polygon(&p);
        sp.translate(shift, None);
        let sq = SplayPolygon::from_polygon(&q);
        let p = paraclose::polygon::translate(&p, shift, None);
        let (got, want) = if k % 2 == 0 {
            unions += 1;
            (sp.merge_union(sq).to_polygon(), hull_union(&p, &q))
        } else {
            sums += 1;
            (sp.merge_minkowski(sq).to_polygon(), minkowski_sum(&p, &q))
        };
        if got != want {
            bad.push(k);
        }
    }
    outcome(bad.is_empty(), format!("{unions} unions and {sums} Minkowski sums, {} mismatches {:?}", bad.len(), &bad[..bad.len().min(5)]))
}

fn criterion_kernel() -> Outcome {
    let mut r = rng(0x5e4a);
    let (mut count_viol, mut sum_viol) = (0, 0);
    for _ in 0..KERNEL_PAIRS {
        let p = random_polygon(&mut r, KERNEL_MAX_SIZE, 0);
        let q = random_polygon(&mut r, KERNEL_MAX_SIZE, 100);
        let s = minkowski_sum(&p, &q);
        let u = hull_union(&p, &q);
        if s.len() > p.len() + q.len() || u.len() > p.len() + q.len() {
            count_viol += 1;
        }
        let pairs: Vec<Point> = p.vertices().iter().flat_map(|&a| q.vertices().iter().map(move |&b| a + b)).collect();
        if hull_of_plain_points(&pairs) != s {
            sum_viol += 1;
        }
    }
    outcome(
        count_viol == 0 && sum_viol == 0,
        format!("{KERNEL_PAIRS} pairs, {count_viol} vertex-bound violations, {sum_viol} Minkowski mismatches"),
    )
}

fn run(results: &mut Vec<(usize, &'static str, Outcome)>, id: usize, name: &'static str, f: impl FnOnce() -> Outcome) {
    let o = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
        outcome(false, format!("panicked: {}", msg.unwrap_or_default()))
    });
    println!("[{}] criterion {id:>2} {name}: {}", if o.ok { "PASS" } else { "FAIL" }, o.detail);
    results.push((id, name, o));
}

fn main() {
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    let mut results = Vec::new();
    let mut pt = ParamTally::default();
    let mut heights = Vec::new();
    run(&mut results, 1, "semiorder oracle equivalence", || criterion_semiorder(&mut pt));
    run(&mut results, 2, "series-parallel oracle equivalence", || criterion_sp(&mut pt));
    run(&mut results, 3, "treewidth oracle equivalence", || criterion_treewidth(&mut pt, &mut heights));
    run(&mut results, 4, "width-2 oracle equivalence", || criterion_width2(&mut pt));
    run(&mut results, 5, "series-parallel vertex bound", criterion_sp_vertex_bound);
    run(&mut results, 6, "series-parallel scaling", criterion_sp_scaling);
    run(&mut results, 7, "semiorder vertex and subdivision bounds", criterion_semiorder_scaling);
    run(&mut results, 8, "treewidth formula height", || criterion_treewidth_height(&mut heights));
    run(&mut results, 9, "splay polygon vs kernel", criterion_splay);
    run(&mut results, 10, "parametric profile and ratio objective", || {
        outcome(
            pt.failures.is_empty() && pt.instances > 0,
            format!(
                "{} instances, {} λ values checked, {} failures{}",
                pt.instances,
                pt.lambdas,
                pt.failures.len(),
                pt.failures.first().map(|f| format!("; first {f}")).unwrap_or_default()
            ),
        )
    });
    run(&mut results, 11, "kernel properties", criterion_kernel);

    let failed: Vec<_> = results.iter().filter(|r| !r.2.ok).map(|r| r.0).collect();
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", results.len());
    } else {
        println!("acceptance: FAILED criteria {failed:?}");
        std::process::exit(1);
    }
}
