//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::time::{Duration, Instant};

use channelscope::channels::{spectral_pairs, ChannelSpec, D2Canonical};
use channelscope::compat::{check_closed_form, ThresholdModel};
use channelscope::geometry::{boundary_csv, boundary_svg, region_boundary};
use channelscope::oracle::{numeric_delta, pair_objective, sample_correlations, SampleMode};
use channelscope::polytope::{fw_vertices, hull_membership, trace_class_vertices};
use channelscope::sampling::{orthonormal_pair, rng_from, sub_seed};
use channelscope::witness::{covariant_threshold, delta_closed, Witness};
use channelscope::Correlation;
use rand::Rng;
use rayon::prelude::*;

type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn six_families() -> Vec<(String, ChannelSpec)> {
    vec![
        ("pauli(0.7,0.1,0.1,0.1)".into(), ChannelSpec::pauli([0.7, 0.1, 0.1, 0.1]).unwrap()),
        ("amp_damp(0.25)".into(), ChannelSpec::amp_damp(0.25).unwrap()),
        ("amp_damp(0.36)".into(), ChannelSpec::amp_damp(0.36).unwrap()),
        ("erasure(3,0.5)".into(), ChannelSpec::erasure(3, 0.5).unwrap()),
        ("depolarizing(2,0.5)".into(), ChannelSpec::depolarizing(2, 0.5).unwrap()),
        ("depolarizing(3,0.5)".into(), ChannelSpec::depolarizing(3, 0.5).unwrap()),
        ("cloning(2)".into(), ChannelSpec::cloning(2).unwrap()),
        ("cloning(3)".into(), ChannelSpec::cloning(3).unwrap()),
        ("transposition(2)".into(), ChannelSpec::transposition(2).unwrap()),
        ("transposition(3)".into(), ChannelSpec::transposition(3).unwrap()),
    ]
}

fn grid_points(n: usize) -> Vec<(f64, f64)> {
    let c = |k: usize| -1.0 + 2.0 * k as f64 / (n - 1) as f64;
    let mut pts = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let (x, y) = (c(i), c(j));
            if x.abs() + y.abs() <= 1.0 + 1e-12 {
                pts.push((x, y));
            }
        }
    }
    pts
}

fn corr(x: f64, y: f64) -> Correlation {
    let s = x.abs() + y.abs();
    let (x, y) = if s > 1.0 { (x / s, y / s) } else { (x, y) };
    Correlation::from_xy(x, y).unwrap()
}

/// Largest `|y|` at `x = 0` for each family, from the Cartesian parametrizations.
fn expected_peak(spec: &ChannelSpec) -> f64 {
    match *spec {
        ChannelSpec::Pauli { probs } => (1..4).map(|k| (2.0 * (probs[0] + probs[k]) - 1.0).abs()).fold(0.0, f64::max),
        ChannelSpec::AmpDamp { lambda } => lambda.sqrt(),
        ChannelSpec::Erasure { lambda, .. } | ChannelSpec::Depolarizing { lambda, .. } => lambda,
        ChannelSpec::Cloning { d } => d as f64 / (d as f64 + 1.0),
        ChannelSpec::Transposition { d } => 1.0 / (d as f64 + 1.0),
        _ => unreachable!(),
    }
}

fn closed_vs_general() -> Outcome {
    let pts = grid_points(101);
    let mut disagreements = 0;
    let mut skipped = 0;
    for (name, spec) in six_families() {
        let model = ThresholdModel::for_channel(&spec).unwrap();
        for &(x, y) in &pts {
            let p = corr(x, y);
            let general = model.check(&p).unwrap();
            if general.margin.abs() <= 1e-7 {
                skipped += 1;
                continue;
            }
            let closed = check_closed_form(&spec, &p).unwrap();
            if closed.compatible != general.compatible {
                disagreements += 1;
                eprintln!("  {name} disagrees at ({x}, {y})");
            }
        }
    }
    outcome(
        disagreements == 0,
        format!("{disagreements} disagreements over 10 channels x {} points ({skipped} in boundary band)", pts.len()),
    )
}

fn oracle_soundness() -> Outcome {
    let mut worst_slack = f64::INFINITY;
    let mut worst_peak: f64 = 0.0;
    let mut slowest = Duration::ZERO;
    let mut lines = Vec::new();
    for (name, spec) in six_families() {
        let start = Instant::now();
        let cloud = sample_correlations(&spec, 100_000, 2024, SampleMode::Random).unwrap();
        let slack = cloud
            .points
            .par_iter()
            .map(|&(x, y)| -check_closed_form(&spec, &corr(x, y)).unwrap().margin)
            .reduce(|| f64::INFINITY, f64::min);
        let boundary = sample_correlations(&spec, 1000, 7, SampleMode::Boundary).unwrap();
        let peak_err = (boundary.max_abs_y() - expected_peak(&spec)).abs();
        let elapsed = start.elapsed();
        slowest = slowest.max(elapsed);
        worst_slack = worst_slack.min(slack);
        worst_peak = worst_peak.max(peak_err);
        lines.push(format!("{name}: slack {slack:.2e}, peak error {peak_err:.2e}, {:.1}s", elapsed.as_secs_f64()));
    }
    for l in &lines {
        eprintln!("  {l}");
    }
    outcome(
        worst_slack >= -1e-7 && worst_peak <= 2e-3 && slowest < Duration::from_secs(60),
        format!(
            "min slack {worst_slack:.2e}, max peak error {worst_peak:.2e}, slowest family {:.1}s",
            slowest.as_secs_f64()
        ),
    )
}

fn random_tuple(rng: &mut impl Rng) -> D2Canonical {
    let c3: f64 = if rng.random_bool(0.1) { 0.0 } else { rng.random_range(0.0..1.0) };
    let d2: f64 = rng.random_range(0.0..1.0);
    let d3: f64 = if c3 == 0.0 { rng.random_range(d2..=1.0) } else { rng.random_range(0.0..1.0) };
    let d1: f64 = rng.random_range(0.0..=d2);
    D2Canonical::from_parts(d1, d2, d3, c3)
}

fn delta_oracle() -> Outcome {
    let results: Vec<(f64, f64)> = (0..1000u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng_from(sub_seed(31, t));
            let can = random_tuple(&mut rng);
            let mut worst: f64 = 0.0;
            for _ in 0..1000 {
                let omega: f64 = rng.random_range(-1.0..=1.0);
                let closed = delta_closed(omega, &can).unwrap();
                worst = worst.max((closed - numeric_delta(&can, omega, 64)).abs());
            }
            let k = can.d2 * can.d2 - can.d3 * can.d3;
            let mut jump: f64 = 0.0;
            if can.c3 > 0.0 && can.d3 > 0.0 && k > 0.0 {
                let edge = k / (can.d3 * can.c3);
                if edge < 1.0 {
                    for s in [1.0, -1.0] {
                        let w = s * edge;
                        let below = delta_closed(w - s * 1e-12, &can).unwrap();
                        let above = delta_closed(w + s * 1e-12, &can).unwrap();
                        jump = jump.max((below - above).abs());
                        worst = worst.max((delta_closed(w, &can).unwrap() - numeric_delta(&can, w, 64)).abs());
                    }
                }
            }
            (worst, jump)
        })
        .collect();
    let worst = results.iter().map(|r| r.0).fold(0.0, f64::max);
    let jump = results.iter().map(|r| r.1).fold(0.0, f64::max);
    outcome(
        worst <= 1e-9 && jump <= 1e-9,
        format!("max |closed - numeric| {worst:.2e}, max jump at branch edge {jump:.2e}"),
    )
}

fn amp_damp_statistic_matches() -> Outcome {
    let mut rng = rng_from(404);
    let mut mismatches = 0;
    let mut band = 0;
    let mut worst_claim = f64::NEG_INFINITY;
    for _ in 0..10_000 {
        let (a, c): (f64, f64) = (rng.random(), rng.random());
        let lambda: f64 = rng.random();
        let p = Correlation::binary(a, 1.0 - a, c, 1.0 - c).unwrap();
        let (p11, p21, p12, p22) = (a, 1.0 - a, c, 1.0 - c);
        let stat = ((p12 * p21).sqrt() - (p11 * p22).sqrt()).powi(2);
        let general = ThresholdModel::for_channel(&ChannelSpec::amp_damp(lambda).unwrap())
            .unwrap()
            .check(&p)
            .unwrap();
        if (stat - lambda).abs() <= 1e-9 || general.margin.abs() <= 1e-9 {
            band += 1;
        } else if (stat <= lambda) != general.compatible {
            mismatches += 1;
        }
        let upper = ((p11 * p22).sqrt() + (p12 * p21).sqrt()).powi(2);
        worst_claim = worst_claim.max(1.0 - (p11 - p22).abs() - upper);
    }
    outcome(
        mismatches == 0 && worst_claim <= 1e-12,
        format!("{mismatches} mismatches ({band} on the boundary), max of 1 - |p11 - p22| - upper root {worst_claim:.2e}"),
    )
}

fn brute_force_count(m: usize, n: usize, d: usize) -> usize {
    let total = n.pow(m as u32);
    (0..total)
        .filter(|&code| {
            let mut used = vec![false; n];
            let mut c = code;
            for _ in 0..m {
                used[c % n] = true;
                c /= n;
            }
            used.iter().filter(|&&u| u).count() <= d
        })
        .count()
}

fn polytope_claims() -> Outcome {
    let mut failures = Vec::new();
    let main = fw_vertices(3, 3, 2).unwrap().len();
    if main != 21 {
        failures.push(format!("m=n=3,d=2 gave {main}"));
    }
    for (m, n, d) in [(2, 2, 1), (2, 2, 2), (3, 4, 2), (4, 3, 2), (4, 4, 3), (5, 3, 1)] {
        let got = fw_vertices(m, n, d).unwrap().len();
        let want = brute_force_count(m, n, d);
        if got != want {
            failures.push(format!("({m},{n},{d}) gave {got}, expected {want}"));
        }
    }
    let tc = trace_class_vertices(2, 2).unwrap();
    for k in 0..=100 {
        let x = -1.0 + 2.0 * k as f64 / 100.0;
        if !hull_membership(&tc, &Correlation::from_xy(x, 0.0).unwrap()).unwrap().is_inside() {
            failures.push(format!("trace class rejects ({x}, 0)"));
        }
        if x.abs() < 1.0 - 1e-6 {
            for y in [1e-6, -1e-6] {
                if hull_membership(&tc, &Correlation::from_xy(x, y).unwrap()).unwrap().is_inside() {
                    failures.push(format!("trace class accepts ({x}, {y})"));
                }
            }
        }
    }
    let full = fw_vertices(2, 2, 2).unwrap();
    for (x, y) in grid_points(41) {
        if !hull_membership(&full, &corr(x, y)).unwrap().is_inside() {
            failures.push(format!("qubit polytope rejects ({x}, {y})"));
        }
    }
    for spec in [ChannelSpec::identity(2).unwrap(), ChannelSpec::dephasing(2, 0.3).unwrap()] {
        let model = ThresholdModel::for_channel(&spec).unwrap();
        for (x, y) in grid_points(41) {
            if !model.check(&corr(x, y)).unwrap().compatible {
                failures.push(format!("{:?} rejects ({x}, {y})", spec.family()));
            }
        }
    }
    let pass = failures.is_empty();
    let detail = if pass {
        "vertex counts, trace-class segment and full square confirmed".to_string()
    } else {
        failures.join("; ")
    };
    outcome(pass, detail)
}

fn universality() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut rng = rng_from(55);
    for d in 2..=5 {
        let specs = [
            ChannelSpec::erasure(d, 0.5).unwrap(),
            ChannelSpec::depolarizing(d, 0.5).unwrap(),
            ChannelSpec::cloning(d).unwrap(),
            ChannelSpec::transposition(d).unwrap(),
        ];
        let omegas: Vec<f64> = (0..20).map(|_| rng.random_range(-1.0..=1.0)).collect();
        for spec in &specs {
            let map = spec.compile().unwrap();
            let pairs = spectral_pairs(spec).unwrap();
            for _ in 0..20 {
                let (phi0, phi1) = orthonormal_pair(d, &mut rng);
                for &omega in &omegas {
                    let exact = covariant_threshold(&pairs, &Witness::plus(omega)).value;
                    worst = worst.max((pair_objective(&map, omega, &phi0, &phi1) - exact).abs());
                }
            }
        }
    }
    outcome(worst <= 1e-9, format!("max deviation over 16 channels x 20 pairs x 20 weights {worst:.2e}"))
}

fn parse_csv(text: &str) -> Vec<(f64, f64)> {
    text.lines()
        .skip(1)
        .filter(|l| !l.is_empty())
        .map(|l| {
            let (x, y) = l.split_once(',').unwrap();
            (x.parse().unwrap(), y.parse().unwrap())
        })
        .collect()
}

fn peak(pts: &[(f64, f64)]) -> f64 {
    pts.iter().map(|p| p.1.abs()).fold(0.0, f64::max)
}

fn flat_half_width(pts: &[(f64, f64)]) -> f64 {
    let top = peak(pts);
    pts.iter().filter(|p| p.1.abs() >= top - 1e-9).map(|p| p.0.abs()).fold(0.0, f64::max)
}

fn edge_height(pts: &[(f64, f64)]) -> f64 {
    pts.iter()
        .filter(|p| (p.0.abs() + p.1.abs() - 1.0).abs() < 1e-12)
        .map(|p| p.1.abs())
        .fold(0.0, f64::max)
}

fn figure_shapes() -> Outcome {
    let res = 400;
    let tol = 1.0 / res as f64;
    let mut checks: Vec<(String, f64, f64)> = Vec::new();
    let emit = |spec: ChannelSpec| {
        let lines = region_boundary(&spec, res).unwrap();
        assert!(boundary_svg(&lines).contains("<path"));
        parse_csv(&boundary_csv(&lines))
    };
    let pts = emit(ChannelSpec::erasure(3, 0.5).unwrap());
    checks.push(("erasure dy".into(), peak(&pts), 0.5));
    for d in [2usize, 3, 4] {
        let df = d as f64;
        let pts = emit(ChannelSpec::cloning(d).unwrap());
        checks.push((format!("cloning({d}) dy"), peak(&pts), df / (df + 1.0)));
    }
    for d in [3usize, 4, 5] {
        let df = d as f64;
        let pts = emit(ChannelSpec::transposition(d).unwrap());
        checks.push((format!("transposition({d}) dy"), peak(&pts), 1.0 / (df + 1.0)));
        checks.push((format!("transposition({d}) dx"), flat_half_width(&pts), (df - 2.0) / (df + 1.0)));
    }
    for (d, lambda) in [(3usize, 0.5), (4, 0.3), (5, 0.7)] {
        let df = d as f64;
        let pts = emit(ChannelSpec::depolarizing(d, lambda).unwrap());
        checks.push((format!("depolarizing({d},{lambda}) dx"), flat_half_width(&pts), (df - 2.0) * (1.0 - lambda) / df));
    }
    for lambda in [0.25, 0.36, 0.6] {
        let pts = emit(ChannelSpec::amp_damp(lambda).unwrap());
        checks.push((format!("amp_damp({lambda}) dy1"), edge_height(&pts), lambda));
        checks.push((format!("amp_damp({lambda}) dy2"), peak(&pts), f64::sqrt(lambda)));
    }
    let worst = checks.iter().map(|c| (c.1 - c.2).abs()).fold(0.0, f64::max);
    for (name, got, want) in &checks {
        if (got - want).abs() > tol {
            eprintln!("  {name}: measured {got}, expected {want}");
        }
    }
    outcome(worst <= tol, format!("{} extents, max deviation {worst:.2e} (tolerance {tol:.2e})", checks.len()))
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("closed forms agree with the general decision procedure", closed_vs_general, Some(Duration::from_secs(10))),
        ("sampled correlations stay inside, boundary sweep reaches extremes", oracle_soundness, None),
        ("closed-form ellipsoid distance matches numerical search", delta_oracle, Some(Duration::from_secs(30))),
        ("amplitude-damping statistic matches the general test", amp_damp_statistic_matches, None),
        ("deterministic-strategy polytopes", polytope_claims, None),
        ("every orthonormal pair is optimal for covariant channels", universality, None),
        ("region outlines have the expected extents", figure_shapes, None),
    ];
    let mut failed = 0;
    for (k, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut result = run();
        let elapsed = start.elapsed();
        if let Some(limit) = limit {
            if elapsed > *limit {
                result.pass = false;
                result.detail.push_str(&format!("; over the {}s budget", limit.as_secs()));
            }
        }
        if !result.pass {
            failed += 1;
        }
        println!(
            "criterion {} {}: {} ({}; {:.2}s)",
            k + 1,
            if result.pass { "PASS" } else { "FAIL" },
            name,
            result.detail,
            elapsed.as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} of 7 criteria failed");
        std::process::exit(1);
    }
    println!("all 7 criteria passed");
}
