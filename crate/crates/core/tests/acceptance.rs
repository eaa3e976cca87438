//! Acceptance suite. Each test prints one `PASS`/`FAIL` line for its
//! criterion (written straight to stderr so it shows without
//! `--nocapture`) and then asserts.

use std::f64::consts::PI;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Poisson};

use hetcorr::channel::ChannelParams;
use hetcorr::experiments::{
    coverage_probability, local_delay, mean_local_delay, relay_outage, simo_joint_occurrence, EstimateRecord,
    ScenarioSpec,
};
use hetcorr::harness::{parse_config, run};
use hetcorr::interference::{conditional_success_rayleigh, mac_activity, CorrelationMode, Deployment, MacSpec};
use hetcorr::point_process::{Point, PointPattern, ProcessSpec, Window};
use hetcorr::stats::combined_se;

const LAMBDA: f64 = 0.1;
const R_MIN: f64 = 0.5;
const HALF: f64 = 20.0;
const P_GRID: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
const R_GRID: [f64; 7] = [-0.9, -0.6, -0.3, 0.0, 0.3, 0.6, 0.9];

fn report(criterion: u32, failures: &[String], summary: String) {
    let verdict = if failures.is_empty() { "PASS" } else { "FAIL" };
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "{verdict} criterion {criterion}: {summary}");
    for f in failures {
        let _ = writeln!(err, "    {f}");
    }
    assert!(failures.is_empty(), "criterion {criterion} failed: {failures:?}");
}

fn ppp() -> ProcessSpec {
    ProcessSpec::HomogeneousPpp { lambda: LAMBDA }
}

/// Parent intensity whose hard-core retained intensity equals `target`,
/// from `lambda = (1 - exp(-lp * pi r^2)) / (pi r^2)`.
fn matched_matern(target: f64, r_min: f64) -> ProcessSpec {
    let a = PI * r_min * r_min;
    assert!(target * a < 1.0);
    ProcessSpec::MaternHardCore { lambda_parent: -(1.0 - target * a).ln() / a, r_min }
}

fn scenario(process: ProcessSpec, alpha: f64, reps: u64, seed: u64) -> ScenarioSpec {
    ScenarioSpec::single_tier(process, alpha, HALF, reps, seed).unwrap()
}

/// `a > b` by more than three combined standard errors.
fn beyond(a: &EstimateRecord, b: &EstimateRecord) -> bool {
    a.estimate - b.estimate > 3.0 * combined_se(a.std_error, b.std_error)
}

// Simpson's rule on [a, b] with `n` (even) panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// `exp(-lambda * int_W theta d^a / (theta d^a + |x|^a) dx)` over the square
/// `[-half, half]^2`, integrated in polar coordinates on one octant.
fn quadrature_coverage(lambda: f64, d: f64, alpha: f64, theta: f64, half: f64) -> f64 {
    let k = theta * d.powf(alpha);
    let radial = |rmax: f64| simpson(|r| r * k / (k + r.powf(alpha)), 0.0, rmax, 4000);
    let octant = simpson(|phi| radial(half / phi.cos()), 0.0, PI / 4.0, 400);
    (-lambda * 8.0 * octant).exp()
}

/// Plain Monte Carlo: fresh Poisson pattern, Rayleigh fading on every link,
/// success iff SIR > theta. Returns (mean, standard error).
fn brute_force_coverage(lambda: f64, d: f64, alpha: f64, theta: f64, half: f64, reps: usize, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = Poisson::new(lambda * 4.0 * half * half).unwrap();
    let mut hits = 0usize;
    for _ in 0..reps {
        let n: f64 = count.sample(&mut rng);
        let mut interference = 0.0;
        for _ in 0..n as usize {
            let x = rng.random_range(-half..half);
            let y = rng.random_range(-half..half);
            let h: f64 = Exp1.sample(&mut rng);
            interference += h * (x * x + y * y).powf(-alpha / 2.0);
        }
        let h0: f64 = Exp1.sample(&mut rng);
        if h0 * d.powf(-alpha) > theta * interference {
            hits += 1;
        }
    }
    let p = hits as f64 / reps as f64;
    (p, (p * (1.0 - p) / reps as f64).sqrt())
}

#[test]
fn criterion_1_ppp_coverage_oracle() {
    let (d, alpha, theta) = (1.0, 4.0, 1.0);
    let analytic = quadrature_coverage(LAMBDA, d, alpha, theta, HALF);
    let (bf, bf_se) = brute_force_coverage(LAMBDA, d, alpha, theta, HALF, 100_000, 0xC0FFEE);
    let mut failures = Vec::new();
    if (bf - analytic).abs() > 4.0 * bf_se {
        failures.push(format!("oracles disagree: quadrature {analytic:.5}, brute force {bf:.5} +- {bf_se:.5}"));
    }
    let start = std::time::Instant::now();
    let rec = coverage_probability(&scenario(ppp(), alpha, 100_000, 1)).unwrap();
    let elapsed = start.elapsed();
    if (rec.estimate - analytic).abs() > 0.01 {
        failures.push(format!("estimate {:.5} vs analytic {analytic:.5}", rec.estimate));
    }
    if elapsed.as_secs_f64() > 120.0 {
        failures.push(format!("took {elapsed:?}"));
    }
    report(
        1,
        &failures,
        format!(
            "coverage {:.5} (se {:.1e}), quadrature {analytic:.5}, brute force {bf:.5}, {:.1}s",
            rec.estimate,
            rec.std_error,
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_2_matern_retained_intensity() {
    let (lp, r) = (1.0, 0.5);
    let expected = (1.0 - (-lp * PI * r * r).exp()) / (PI * r * r);
    let window = Window::centered_square(6.0).unwrap();
    let interior = Window::centered_square(5.0).unwrap();
    let spec = ProcessSpec::MaternHardCore { lambda_parent: lp, r_min: r };
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut failures = Vec::new();
    let mut inside = 0usize;
    let patterns = 1000;
    for k in 0..patterns {
        let pat = spec.sample(&window, &mut rng).unwrap();
        let pts = pat.points();
        'pairs: for i in 0..pts.len() {
            for j in 0..i {
                let (dx, dy) = (pts[i].x - pts[j].x, pts[i].y - pts[j].y);
                if dx * dx + dy * dy < r * r {
                    failures.push(format!("pattern {k}: points {j} and {i} closer than r_min"));
                    break 'pairs;
                }
            }
        }
        inside += pts.iter().filter(|p| interior.contains(p)).count();
    }
    let empirical = inside as f64 / (patterns as f64 * interior.area());
    let rel = (empirical - expected).abs() / expected;
    if rel > 0.02 {
        failures.push(format!("relative error {rel:.4}"));
    }
    report(2, &failures, format!("intensity {empirical:.5} vs {expected:.5} (rel err {rel:.4}), {patterns} patterns"));
}

/// Direct Monte Carlo of the conditional success probability: per draw,
/// Bernoulli activity for each interferer and Rayleigh fading everywhere.
fn brute_force_conditional(
    d: f64,
    theta: f64,
    points: &[Point],
    activity: f64,
    alpha: f64,
    r0: f64,
    noise: f64,
    draws: usize,
    rng: &mut ChaCha8Rng,
) -> (f64, f64) {
    let loss = |r: f64| r.max(r0).powf(-alpha);
    let losses: Vec<f64> = points.iter().map(|p| loss(p.norm())).collect();
    let signal_loss = loss(d);
    let mut hits = 0usize;
    for _ in 0..draws {
        let mut interference = 0.0;
        for &l in &losses {
            let on = rng.random::<f64>() < activity;
            let h: f64 = Exp1.sample(rng);
            if on {
                interference += h * l;
            }
        }
        let h0: f64 = Exp1.sample(rng);
        if h0 * signal_loss > theta * (interference + noise) {
            hits += 1;
        }
    }
    let p = hits as f64 / draws as f64;
    (p, (p * (1.0 - p) / draws as f64).sqrt())
}

#[test]
fn criterion_3_closed_form_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let window = Window::centered_square(5.0).unwrap();
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for case in 0..20 {
        let n = rng.random_range(0..=10);
        let points: Vec<Point> =
            (0..n).map(|_| Point::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0))).collect();
        let d = rng.random_range(0.5..2.0);
        let theta = rng.random_range(0.25..4.0);
        let alpha = rng.random_range(2.5..5.0);
        let r0 = if case % 3 == 0 { 0.3 } else { 0.0 };
        let noise = if case % 4 == 1 { 0.05 } else { 0.0 };
        let mac = match case % 3 {
            0 => MacSpec::AlwaysOn,
            1 => MacSpec::aloha(rng.random_range(0.1..0.9)).unwrap(),
            _ => MacSpec::fhma(rng.random_range(2..6)).unwrap(),
        };
        let params = ChannelParams::new(alpha, r0, noise, 1.0).unwrap();
        let dep = Deployment::uniform(PointPattern::new(points.clone(), window).unwrap(), 1.0).unwrap();
        let closed = conditional_success_rayleigh(d, theta, &dep, &mac, &params).unwrap();
        let activity = mac.activity_probability();
        let (mc, se) = brute_force_conditional(d, theta, &points, activity, alpha, r0, noise, 1_000_000, &mut rng);
        let z = match (se > 0.0, closed == mc) {
            (true, _) => (closed - mc).abs() / se,
            (false, true) => 0.0,
            (false, false) => f64::INFINITY,
        };
        worst = worst.max(z);
        if z > 3.0 {
            failures.push(format!("case {case}: n={n} closed {closed:.5} mc {mc:.5} se {se:.1e} ({z:.2} se)"));
        }
    }
    report(3, &failures, format!("20 patterns, worst deviation {worst:.2} se"));
}

#[test]
fn criterion_4_simo_joint_occurrence_trends() {
    let reps = 50_000;
    let matern = matched_matern(LAMBDA, R_MIN);
    let mut failures = Vec::new();
    let mut gaps = Vec::new();
    for alpha in [3.0, 4.0, 5.0, 6.0] {
        let est = |p: &ProcessSpec, mode| simo_joint_occurrence(&scenario(*p, alpha, reps, 4), 2, mode).unwrap();
        let ppp_c = est(&ppp(), CorrelationMode::CORRELATED);
        let ppp_i = est(&ppp(), CorrelationMode::INDEPENDENT);
        let mat_c = est(&matern, CorrelationMode::CORRELATED);
        let mat_i = est(&matern, CorrelationMode::INDEPENDENT);
        for (label, m, p) in [("correlated", &mat_c, &ppp_c), ("independent", &mat_i, &ppp_i)] {
            if !beyond(m, p) {
                failures.push(format!("alpha {alpha} {label}: matern {:.4} vs ppp {:.4}", m.estimate, p.estimate));
            }
        }
        for (label, c, i) in [("ppp", &ppp_c, &ppp_i), ("matern", &mat_c, &mat_i)] {
            if !beyond(c, i) {
                failures.push(format!("alpha {alpha} {label}: correlated {:.4} vs independent {:.4}", c.estimate, i.estimate));
            }
        }
        gaps.push((ppp_c.estimate - ppp_i.estimate, mat_c.estimate - mat_i.estimate));
    }
    let (first, last) = (gaps[0], gaps[3]);
    if !(last.0 > first.0) {
        failures.push(format!("ppp gap at alpha 6 ({:.4}) not above alpha 3 ({:.4})", last.0, first.0));
    }
    if !(last.1 > first.1) {
        failures.push(format!("matern gap at alpha 6 ({:.4}) not above alpha 3 ({:.4})", last.1, first.1));
    }
    let shown: Vec<String> = gaps.iter().map(|g| format!("{:.4}/{:.4}", g.0, g.1)).collect();
    report(4, &failures, format!("correlation gaps ppp/matern over alpha 3..6: {}", shown.join(", ")));
}

#[test]
fn criterion_5_local_delay_trends() {
    let reps = 50_000;
    let mut failures = Vec::new();
    let mut at_half = Vec::new();
    for (name, process) in [("ppp", ppp()), ("matern", matched_matern(LAMBDA, R_MIN))] {
        let s = scenario(process, 4.0, reps, 5);
        let corr = mean_local_delay(&s, &P_GRID, CorrelationMode::CORRELATED).unwrap();
        let ind = mean_local_delay(&s, &P_GRID, CorrelationMode::INDEPENDENT).unwrap();
        for (label, curve) in [("correlated", &corr), ("independent", &ind)] {
            for w in curve.windows(2) {
                let slack = 3.0 * combined_se(w[0].std_error, w[1].std_error);
                if w[1].estimate < w[0].estimate - slack {
                    failures.push(format!("{name} {label}: delay drops from {:.4} to {:.4}", w[0].estimate, w[1].estimate));
                }
            }
            if curve.iter().any(|r| r.capped_fraction > 0.0) {
                failures.push(format!("{name} {label}: delay cap reached"));
            }
        }
        for (c, i) in corr.iter().zip(&ind) {
            if !beyond(c, i) {
                failures.push(format!(
                    "{name} p={}: static {:.4} not above decorrelated {:.4}",
                    c.param("aloha_p").unwrap(),
                    c.estimate,
                    i.estimate
                ));
            }
        }
        at_half.push((corr[4].clone(), ind[4].clone()));
    }
    let (ppp_half, mat_half) = (&at_half[0], &at_half[1]);
    for (label, p, m) in [("correlated", &ppp_half.0, &mat_half.0), ("independent", &ppp_half.1, &mat_half.1)] {
        if !beyond(p, m) {
            failures.push(format!("p=0.5 {label}: matern {:.4} not below ppp {:.4}", m.estimate, p.estimate));
        }
    }
    report(
        5,
        &failures,
        format!(
            "delay at p=0.5: ppp {:.4}/{:.4}, matern {:.4}/{:.4} (static/decorrelated)",
            ppp_half.0.estimate, ppp_half.1.estimate, mat_half.0.estimate, mat_half.1.estimate
        ),
    );
}

#[test]
fn criterion_6_relay_outage_trends() {
    let reps = 50_000;
    let mut failures = Vec::new();
    let mut curves = Vec::new();
    for process in [ppp(), matched_matern(LAMBDA, R_MIN)] {
        let s = scenario(process, 4.0, reps, 6);
        let c = relay_outage(&s, &R_GRID, CorrelationMode::CORRELATED).unwrap();
        let u = relay_outage(&s, &R_GRID, CorrelationMode::INDEPENDENT).unwrap();
        curves.push((c, u));
    }
    let (ppp_curves, mat_curves) = (&curves[0], &curves[1]);
    for (label, p, m) in [("correlated", &ppp_curves.0, &mat_curves.0), ("uncorrelated", &ppp_curves.1, &mat_curves.1)] {
        for (pr, mr) in p.iter().zip(m) {
            if !beyond(pr, mr) {
                failures.push(format!(
                    "R={} {label}: matern {:.4} not below ppp {:.4}",
                    pr.param("relay_position").unwrap(),
                    mr.estimate,
                    pr.estimate
                ));
            }
        }
    }
    let mut gaps = Vec::new();
    for (name, (c, u)) in [("ppp", ppp_curves), ("matern", mat_curves)] {
        for idx in [5, 6] {
            if !beyond(&c[idx], &u[idx]) {
                failures.push(format!(
                    "{name} R={}: correlated {:.4} not above uncorrelated {:.4}",
                    R_GRID[idx], c[idx].estimate, u[idx].estimate
                ));
            }
        }
        let gap = |i: usize| c[i].estimate - u[i].estimate;
        if !(gap(6) >= gap(3)) {
            failures.push(format!("{name}: gap at R=0.9 ({:.4}) below gap at R=0 ({:.4})", gap(6), gap(3)));
        }
        gaps.push(format!("{name} {:+.4} at R=0, {:+.4} at R=0.9", gap(3), gap(6)));
    }
    report(6, &failures, format!("correlation gaps: {}", gaps.join("; ")));
}

#[test]
fn criterion_7_diversity_is_sublinear() {
    let s = scenario(ppp(), 4.0, 100_000, 7);
    let mut failures = Vec::new();
    let ms = [1u32, 2, 4, 8];
    let corr: Vec<EstimateRecord> =
        ms.iter().map(|&m| simo_joint_occurrence(&s, m, CorrelationMode::CORRELATED).unwrap()).collect();
    let ind: Vec<EstimateRecord> =
        ms.iter().map(|&m| simo_joint_occurrence(&s, m, CorrelationMode::INDEPENDENT).unwrap()).collect();
    let nlog1 = -ind[0].estimate.ln();
    for (&m, r) in ms.iter().zip(&ind) {
        let want = f64::from(m) * nlog1;
        let got = -r.estimate.ln();
        if (got - want).abs() > 1e-12 * want {
            failures.push(format!("independent M={m}: -log P = {got:.15} vs {want:.15}"));
        }
    }
    // -log P has standard error se(P) / P.
    let ratios: Vec<(f64, f64)> = ms
        .iter()
        .zip(&corr)
        .map(|(&m, r)| {
            let mf = f64::from(m);
            (-r.estimate.ln() / mf, r.std_error / r.estimate / mf)
        })
        .collect();
    for (&m, r) in ms.iter().zip(&corr) {
        let bound = f64::from(m) * -corr[0].estimate.ln();
        let se = r.std_error / r.estimate;
        if -r.estimate.ln() > bound + 3.0 * se {
            failures.push(format!("correlated M={m}: -log P = {:.4} above linear {bound:.4}", -r.estimate.ln()));
        }
    }
    for (k, w) in ratios.windows(2).enumerate() {
        if !(w[0].0 - w[1].0 > 3.0 * combined_se(w[0].1, w[1].1)) {
            failures.push(format!("ratio not decreasing from M={} ({:.4}) to M={} ({:.4})", ms[k], w[0].0, ms[k + 1], w[1].0));
        }
    }
    let shown: Vec<String> = ratios.iter().map(|r| format!("{:.4}", r.0)).collect();
    report(7, &failures, format!("(-log P_M)/M for M=1,2,4,8: {}", shown.join(", ")));
}

#[test]
fn criterion_8_golden_csv_is_deterministic() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden");
    let mut failures = Vec::new();
    for name in ["coverage", "simo", "delay", "relay"] {
        let text = std::fs::read_to_string(format!("{dir}/{name}.cfg")).unwrap();
        let golden = std::fs::read_to_string(format!("{dir}/{name}.csv")).unwrap();
        let mut config = parse_config(&text).unwrap();
        for (attempt, threads) in [1usize, 8, 1, 8].into_iter().enumerate() {
            config.threads = threads;
            let csv = run(&config).unwrap();
            if csv != golden {
                failures.push(format!("{name}: run {attempt} with {threads} threads differs from golden"));
            }
        }
    }
    report(8, &failures, "4 experiments x threads {1, 8} x 2 runs byte-identical".into());
}

#[test]
fn criterion_9_fhma_matches_aloha() {
    let reps = 50_000;
    let mut failures = Vec::new();
    let fhma = MacSpec::fhma(5).unwrap();
    let aloha = MacSpec::aloha(0.2).unwrap();
    let with = |mac, seed| ScenarioSpec { mac, ..scenario(ppp(), 4.0, reps, seed) };
    let (sf, sa) = (with(fhma, 91), with(aloha, 92));
    let mut lines = Vec::new();
    let mut compare = |what: &str, f: &EstimateRecord, a: &EstimateRecord| {
        let z = (f.estimate - a.estimate).abs() / combined_se(f.std_error, a.std_error);
        if !(z <= 3.0) {
            failures.push(format!("{what}: fhma {:.5} vs aloha {:.5} ({z:.2} se)", f.estimate, a.estimate));
        }
        lines.push(format!("{what} {:.4}/{:.4}", f.estimate, a.estimate));
    };
    compare("coverage", &coverage_probability(&sf).unwrap(), &coverage_probability(&sa).unwrap());
    for mode in [CorrelationMode::CORRELATED, CorrelationMode::INDEPENDENT] {
        let label = format!("delay {}", mode.label());
        compare(&label, &local_delay(&sf, mode).unwrap(), &local_delay(&sa, mode).unwrap());
    }

    // Per-slot activity frequencies of the two schemes.
    let window = Window::centered_square(1.0).unwrap();
    let pattern = PointPattern::new(vec![Point::ORIGIN; 1000], window).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let slots = 200;
    let on = |mac: &MacSpec, rng: &mut ChaCha8Rng| {
        (0..slots).map(|_| mac_activity(&pattern, mac, rng).iter().filter(|&&b| b).count()).sum::<usize>() as f64
            / (slots * pattern.len()) as f64
    };
    let (qf, qa) = (on(&fhma, &mut rng), on(&aloha, &mut rng));
    let se = (2.0 * 0.2 * 0.8 / (slots * pattern.len()) as f64).sqrt();
    if (qf - qa).abs() > 3.0 * se {
        failures.push(format!("activity frequency fhma {qf:.4} vs aloha {qa:.4}"));
    }
    lines.push(format!("activity {qf:.4}/{qa:.4}"));
    report(9, &failures, format!("fhma/aloha: {}", lines.join(", ")));
}
