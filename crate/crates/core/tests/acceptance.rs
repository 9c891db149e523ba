//! Acceptance criteria 1–9, one PASS/FAIL line each.
//!
//! Runs as a plain binary (`harness = false`) so the lines always print.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use bclab::diagrams::{self, OrderMode, Tiers};
use bclab::equations::{residual_norm, InvariantReport};
use bclab::massconds::{self, EtaFreeStatus, MassConditionId};
use bclab::model::{validate_masses, MassVector, PlanarConfig, ShapeParam};
use bclab::report::{alignment, execute, parse_config, Alignment};
use bclab::solver::{continue_eta, multistart_report, MultistartReport, PathStatus, SolutionClass, SolverOptions};
use common::{collinear_fixture, lagrange_fixture, triangle_roots};

struct Outcome {
    ok: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome { ok: true, detail: detail.into() }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome { ok: false, detail: detail.into() }
}

/// Solutions collected across criteria for the invariant suite.
#[derive(Default)]
struct Pool {
    solutions: Vec<(MassVector, ShapeParam, PlanarConfig)>,
}

impl Pool {
    fn absorb(&mut self, masses: &MassVector, shape: ShapeParam, classes: &[SolutionClass]) {
        for c in classes {
            self.solutions.push((masses.clone(), shape, c.canonical.clone()));
        }
    }
}

fn run_seed(masses: &MassVector, eta: f64, seed: u64, starts: usize) -> MultistartReport {
    let opts = SolverOptions { seed, n_starts: starts, ..SolverOptions::default() };
    multistart_report(masses, ShapeParam::new(eta).unwrap(), &opts).unwrap()
}

fn criterion_1() -> Outcome {
    let eta0 = ShapeParam::new(0.0).unwrap();
    let (m, lag) = lagrange_fixture();
    let (_, col) = collinear_fixture();
    let a = residual_norm(&lag, &m, eta0).unwrap();
    let b = residual_norm(&col, &m, eta0).unwrap();
    let detail = format!("lagrange {a:.2e}, collinear {b:.2e}");
    if a < 1e-12 && b < 1e-12 {
        pass(detail)
    } else {
        fail(detail)
    }
}

fn criterion_2(pool: &mut Pool) -> Outcome {
    let m = validate_masses(&[1.0, 1.0, 1.0]).unwrap();
    let mut seen = Vec::new();
    for seed in 0..3 {
        let r = run_seed(&m, 0.0, seed, 2000);
        let collinear = r.classes.iter().filter(|c| alignment(&c.canonical) != Alignment::Planar).count();
        let triangles = r.classes.len() - collinear;
        pool.absorb(&m, ShapeParam::new(0.0).unwrap(), &r.classes);
        seen.push((seed, r.classes.len(), collinear, triangles));
    }
    let detail = seen
        .iter()
        .map(|(s, n, c, t)| format!("seed {s}: {n} ({c} collinear + {t} triangular)"))
        .collect::<Vec<_>>()
        .join("; ");
    if seen.iter().all(|s| (s.1, s.2, s.3) == (5, 3, 2)) {
        pass(detail)
    } else {
        fail(detail)
    }
}

fn axis_scale_error(c: &PlanarConfig, axis: usize, scale: f64) -> f64 {
    let a = 1.25f64.cbrt() * scale;
    let mut coords: Vec<f64> = c.positions().iter().map(|p| p[axis]).collect();
    coords.sort_by(f64::total_cmp);
    let want = [-a, 0.0, a];
    coords.iter().zip(want).map(|(x, w)| (x - w).abs()).fold(0.0, f64::max)
}

fn criterion_3(pool: &mut Pool) -> Outcome {
    let eta = 0.1;
    let masses = [1.0, 1.0, 1.0];
    let m = validate_masses(&masses).unwrap();
    let oracle = triangle_roots(&masses, eta);
    let r = run_seed(&m, eta, 0, 2000);
    pool.absorb(&m, ShapeParam::new(eta).unwrap(), &r.classes);
    let mut x = Vec::new();
    let mut y = Vec::new();
    let mut other = 0;
    let mut planar = 0;
    for c in &r.classes {
        match alignment(&c.canonical) {
            Alignment::X => x.push(axis_scale_error(&c.canonical, 0, (1.0 + eta).powf(-1.0 / 3.0))),
            Alignment::Y => y.push(axis_scale_error(&c.canonical, 1, (1.0 - eta).powf(-1.0 / 3.0))),
            Alignment::Line => other += 1,
            Alignment::Planar => planar += 1,
        }
    }
    let worst = x.iter().chain(&y).cloned().fold(0.0, f64::max);
    let detail = format!(
        "x-axis {}, y-axis {}, other lines {other}, worst scale error {worst:.2e}, triangular {planar} vs oracle {}",
        x.len(),
        y.len(),
        oracle.len()
    );
    if x.len() == 3 && y.len() == 3 && other == 0 && worst < 1e-8 && planar == oracle.len() {
        pass(detail)
    } else {
        fail(detail)
    }
}

fn criterion_4(pool: &mut Pool) -> Outcome {
    let (m, col) = collinear_fixture();
    let opts = SolverOptions::default();
    let mut errs = Vec::new();
    for (base, target) in [(col.clone(), 1.3f64), (col.rotated(std::f64::consts::FRAC_PI_2), 0.7)] {
        let path = continue_eta(&base, &m, 0.0, 0.3, 10, &opts).unwrap();
        if path.status != PathStatus::Completed {
            return fail(format!("path stopped: {:?}", path.status));
        }
        let (eta, end) = path.last().unwrap();
        let want = base.scaled(target.powf(-1.0 / 3.0));
        errs.push(end.max_abs_diff(&want));
        let shape = ShapeParam::new(eta).unwrap();
        pool.solutions.push((m.clone(), shape, end.clone()));
    }
    let detail = format!("x-axis error {:.2e}, y-axis error {:.2e}", errs[0], errs[1]);
    if errs.iter().all(|e| *e < 1e-8) {
        pass(detail)
    } else {
        fail(detail)
    }
}

fn criterion_5(pool: &Pool) -> Outcome {
    let mut worst = [0.0f64; 5];
    let mut bad = 0;
    for (m, shape, q) in &pool.solutions {
        let Ok(r) = InvariantReport::compute(q, m, *shape) else {
            bad += 1;
            continue;
        };
        let rel = [
            r.is_minus_u / r.potential,
            if shape.eta() > 0.0 { r.xy_moment / r.moment } else { 0.0 },
            r.com_norm,
            r.lift_residual,
            r.residual_norm,
        ];
        for (w, v) in worst.iter_mut().zip(rel) {
            *w = w.max(v);
        }
        if !(rel[0] < 1e-9 && rel[1] < 1e-9 && rel[2] < 1e-9 && rel[3] < 1e-9) {
            bad += 1;
        }
    }
    let detail = format!(
        "{} solutions, {bad} failing; worst |I_S-U|/U {:.1e}, |Σmxy|/I_S {:.1e}, |Σmq| {:.1e}, lift {:.1e}",
        pool.solutions.len(),
        worst[0],
        worst[1],
        worst[2],
        worst[3]
    );
    if bad == 0 && !pool.solutions.is_empty() {
        pass(detail)
    } else {
        fail(detail)
    }
}

fn criterion_6() -> Outcome {
    let equal = diagrams::enumerate_report(OrderMode::EqualOrder, Tiers::Full);
    let nonequal = diagrams::enumerate_report(OrderMode::NonEqualOrder, Tiers::Full);
    let expected_equal: BTreeSet<String> = [
        "I(a)", "I(b)", "II", "III", "IV(a)", "IV(b)", "V-1(a)", "V-1(b)", "V-2(a)", "V-2(b)", "VI(a)", "VI(b)",
        "VII(a)", "VII(b)", "VIII", "IX",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let expected_nonequal: BTreeSet<String> = ["I'", "II'", "III'", "IV'"].iter().map(|s| s.to_string()).collect();
    let names = |r: &diagrams::EnumerationReport| -> BTreeSet<String> {
        r.classes.iter().flat_map(|c| c.names.iter().cloned()).collect()
    };
    let mut problems = Vec::new();
    for (r, want) in [(&equal, &expected_equal), (&nonequal, &expected_nonequal)] {
        for c in &r.classes {
            if c.names.is_empty() {
                problems.push(format!("unnamed {} '{}'", r.order_mode, c.representative.encoding()));
            }
        }
        let got = names(r);
        for n in want.difference(&got) {
            problems.push(format!("missing {} {n}", r.order_mode));
        }
        for n in got.difference(want) {
            problems.push(format!("unexpected {} {n}", r.order_mode));
        }
    }
    let detail = format!(
        "equal: {} names in {} classes; non-equal: {} names in {} classes",
        names(&equal).len(),
        equal.classes.len(),
        names(&nonequal).len(),
        nonequal.classes.len()
    );
    if problems.is_empty() {
        pass(detail)
    } else {
        fail(format!("{detail}; {}", problems.join(", ")))
    }
}

fn criterion_7() -> Outcome {
    let m = validate_masses(&[1.0, 1.0, 1.0, 1.0]).unwrap();
    let scan = massconds::scan_exceptional(&m, 0.0, 0.999, 2000, false).unwrap();
    let first = scan.roots.iter().min_by(|a, b| a.eta.total_cmp(&b.eta));
    let first_ok = matches!(first, Some(r) if r.condition == MassConditionId::III && (r.eta - 0.5).abs() < 1e-10)
        && scan.eta_first.is_some_and(|e| (e - 0.5).abs() < 1e-10);
    let infeasible: BTreeSet<MassConditionId> = massconds::infeasible_list().into_iter().collect();
    let want: BTreeSet<MassConditionId> =
        [MassConditionId::I, MassConditionId::V1, MassConditionId::V3, MassConditionId::VII].into_iter().collect();
    let mut viii_ok = true;
    for m4 in [0.1, 1.0, 2.5, 7.0] {
        let mv = validate_masses(&[1.0, 1.0, 0.25, m4]).unwrap();
        for k in 0..=20 {
            let eta = 0.0499 * k as f64;
            viii_ok &= massconds::condition_gap(MassConditionId::VIII, &mv, eta).unwrap() < 1e-12;
        }
        let s = massconds::scan_exceptional(&mv, 0.0, 0.999, 200, false).unwrap();
        viii_ok &= s.eta_free.contains(&(MassConditionId::VIII, EtaFreeStatus::Always));
    }
    let detail = format!(
        "eta_first {:?} via {:?}; infeasible {:?}; (1,1,1/4,m4) under VIII: {viii_ok}",
        scan.eta_first,
        first.map(|r| r.condition),
        infeasible
    );
    if first_ok && infeasible == want && viii_ok {
        pass(detail)
    } else {
        fail(detail)
    }
}

fn criterion_8(pool: &mut Pool) -> Outcome {
    let m = validate_masses(&[1.0, 2.0, 3.0, 4.0]).unwrap();
    let k = 10_000;
    let mut rows = Vec::new();
    let mut ok = true;
    for i in 1..=5 {
        let eta = 0.02 * i as f64;
        let mut counts = Vec::new();
        let mut min_r = f64::INFINITY;
        for seed in 0..3 {
            let r = run_seed(&m, eta, seed, 2 * k);
            min_r = r.classes.iter().map(|c| c.min_rij).fold(min_r, f64::min);
            counts.push(r.classes.len());
            if seed == 0 {
                pool.absorb(&m, ShapeParam::new(eta).unwrap(), &r.classes);
            }
        }
        let half = run_seed(&m, eta, 0, k).classes.len();
        let stable = counts.iter().all(|c| *c == counts[0]) && half == counts[0] && counts[0] > 0;
        ok &= stable && min_r >= 1e-3;
        rows.push(format!("η={eta:.2}: {counts:?} at 2K, {half} at K, min r {min_r:.3}"));
    }
    let detail = rows.join("; ");
    if ok {
        pass(detail)
    } else {
        fail(detail)
    }
}

fn strip_timestamp(json: &str) -> String {
    json.lines().filter(|l| !l.trim_start().starts_with("\"timestamp\"")).collect::<Vec<_>>().join("\n")
}

fn criterion_9() -> Outcome {
    let text = "command = solve\nmasses = 1, 2, 3, 4\neta = 0.05\nn_starts = 1500\nseed = 11\n";
    let cfg = parse_config(text).unwrap();
    let one = || {
        rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| execute(&cfg).unwrap().to_json())
    };
    let many = || {
        rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| execute(&cfg).unwrap().to_json())
    };
    let a = strip_timestamp(&one());
    let b = strip_timestamp(&one());
    let c = strip_timestamp(&many());
    let detail = format!("{} bytes; repeat identical {}, 1 vs 4 threads identical {}", a.len(), a == b, a == c);
    if a == b && a == c {
        pass(detail)
    } else {
        fail(detail)
    }
}

fn main() {
    let mut pool = Pool::default();
    let mut results: Vec<(usize, Duration, Duration, Outcome)> = Vec::new();
    let mut timed = |n: usize, limit: u64, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let out = f();
        results.push((n, t.elapsed(), Duration::from_secs(limit), out));
    };
    timed(1, 1, &mut criterion_1);
    timed(2, 30, &mut || criterion_2(&mut pool));
    timed(3, 60, &mut || criterion_3(&mut pool));
    timed(4, 5, &mut || criterion_4(&mut pool));
    timed(8, 600, &mut || criterion_8(&mut pool));
    timed(5, 600, &mut || criterion_5(&pool));
    timed(6, 300, &mut criterion_6);
    timed(7, 1, &mut criterion_7);
    timed(9, 600, &mut criterion_9);
    results.sort_by_key(|r| r.0);

    let mut failed = 0;
    for (n, took, limit, out) in &results {
        let in_time = took <= limit;
        let ok = out.ok && in_time;
        failed += usize::from(!ok);
        let timing = if in_time {
            format!("{:.2}s", took.as_secs_f64())
        } else {
            format!("{:.2}s over {}s limit", took.as_secs_f64(), limit.as_secs())
        };
        println!("criterion {n}: {} [{timing}] {}", if ok { "PASS" } else { "FAIL" }, out.detail);
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
