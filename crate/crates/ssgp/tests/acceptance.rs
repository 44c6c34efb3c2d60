//! End-to-end acceptance checks, one test per criterion. Each prints a
//! single pass/fail line; run with `--nocapture` to see all of them.

use std::sync::OnceLock;

use ssgp::functionals::{KernelFamily, TestFunction};
use ssgp::harness::{parse_config, render_csv, run_experiment, ExperimentReport};
use ssgp::limit_moments::{
    determinacy_check, limit_moment, moment_upper_bound, MomentQuery,
};
use ssgp::process_models::ProcessSpec;
use ssgp::rng::stream_rng;
use ssgp::slnd::{conditional_variance, estimate_kappa_slnd, ConditioningProblem};
use ssgp::spectral_constants::{compute_c, compute_c_oracle, compute_d, verify_d_limit};

use rand::Rng;

fn report(criterion: &str, ok: bool, detail: String) {
    println!(
        "criterion {criterion}: {} — {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {criterion} failed: {detail}");
}

#[test]
fn criterion_01_slnd_brownian_exactness() {
    let spec = ProcessSpec::fbm(0.5, 1).unwrap();
    let mut rng = stream_rng(11, 0);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let t: f64 = rng.random_range(0.1..10.0);
        let m = rng.random_range(1..=6);
        let mut s: Vec<f64> = (0..m)
            .map(|_| rng.random_range(1e-3 * t..t * (1.0 - 1e-9)))
            .collect();
        s.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let p = ConditioningProblem::new(spec, t, s.clone()).unwrap();
        let cv = conditional_variance(&p).unwrap();
        worst = worst.max((cv - (t - s.last().unwrap())).abs());
    }
    let kappa = estimate_kappa_slnd(&spec, 1000, 6, 11).unwrap();
    let ok = worst < 1e-10 && kappa.kappa_hat >= 1.0 - 1e-8;
    report(
        "01 SLND Brownian exactness",
        ok,
        format!(
            "max |cond_var - (t - max s)| = {worst:.3e}, kappa_hat = {:.12}",
            kappa.kappa_hat
        ),
    );
}

#[test]
fn criterion_02_slnd_positivity() {
    let specs = [
        ProcessSpec::bi_fbm(0.6, 0.8, 1).unwrap(),
        ProcessSpec::sub_fbm(0.3, 1).unwrap(),
        ProcessSpec::sub_fbm(0.7, 1).unwrap(),
    ];
    let mut ok = true;
    let mut detail = Vec::new();
    for spec in specs {
        let kappa = estimate_kappa_slnd(&spec, 10_000, 6, 17).unwrap();
        let spectral = spec.check_slnd_spectral(100.0, 2001);
        ok &= kappa.kappa_hat > 0.0 && spectral.c_hat > 0.0;
        detail.push(format!(
            "{}: kappa_hat = {:.4e}, c_hat = {:.4e}",
            spec.describe(),
            kappa.kappa_hat,
            spectral.c_hat
        ));
    }
    report("02 SLND positivity", ok, detail.join("; "));
}

#[test]
fn criterion_03_assumption_a_constants() {
    let t_grid: Vec<f64> = (1..=8).map(|i| i as f64 * 0.8).collect();
    let eps_grid = [0.05, 0.01, 1e-3, 1e-4];
    let cases: [(ProcessSpec, f64, f64); 3] = [
        (ProcessSpec::fbm(0.6, 1).unwrap(), 1.0, 1e-12),
        (
            ProcessSpec::bi_fbm(0.6, 0.8, 1).unwrap(),
            (2.0f64).powf(1.0 - 0.8),
            0.01,
        ),
        (ProcessSpec::sub_fbm(0.7, 1).unwrap(), 1.0, 0.01),
    ];
    let mut ok = true;
    let mut detail = Vec::new();
    for (spec, sigma, tol) in cases {
        let rep = spec.check_assumption_a(&t_grid, &eps_grid, 1e-2).unwrap();
        let sigma_ok = (rep.sigma_hat - sigma).abs() <= tol * sigma;
        let phi_finest = rep.phi_envelope.last().unwrap().1;
        ok &= sigma_ok && phi_finest < 1e-2 && rep.pass;
        detail.push(format!(
            "{}: sigma_hat = {:.6} (target {sigma:.6}), phi_finest = {:.2e}",
            spec.describe(),
            rep.sigma_hat,
            phi_finest
        ));
    }
    report("03 assumption (A) constants", ok, detail.join("; "));
}

#[test]
fn criterion_04_constant_c_closed_form() {
    let f = TestFunction::new(KernelFamily::Gauss, 1).unwrap();
    let closed = 4.0 * (2.0f64.sqrt() - 1.0) / std::f64::consts::PI.sqrt();
    let c = compute_c(0.5, 1, &f, 1.0).unwrap();
    let oracle = compute_c_oracle(0.5, &f, 1.0).unwrap();
    let gap_closed = (c.value / closed - 1.0).abs();
    let gap_oracle = (c.value / oracle - 1.0).abs();
    let ok = gap_closed < 1e-6 && gap_oracle < 1e-6;
    report(
        "04 constant C closed form",
        ok,
        format!(
            "compute_c = {:.10}, closed form = {closed:.10} (rel gap {gap_closed:.2e}), oracle rel gap {gap_oracle:.2e}",
            c.value
        ),
    );
}

#[test]
fn criterion_05_constant_d_closed_forms() {
    let two_pi = 2.0 * std::f64::consts::PI;
    let xg = TestFunction::new(KernelFamily::XGauss, 1).unwrap();
    let g = TestFunction::new(KernelFamily::Gauss, 1).unwrap();
    let d1 = compute_d(1.0 / 3.0, 1, &xg, 1.0, 1).unwrap();
    let d2 = compute_d(1.0 / 5.0, 1, &g, 1.0, 2).unwrap();
    let t1 = 2.0 / two_pi.sqrt();
    let t2 = 3.0 / (2.0 * two_pi.sqrt());
    let seq = verify_d_limit(1.0 / 3.0, 1, &xg, 1.0, &[1e2, 1e4, 1e6]).unwrap();
    let gaps: Vec<f64> = seq.iter().map(|v| (v - d1).abs()).collect();
    let monotone = gaps.windows(2).all(|w| w[1] < w[0]);
    let shrink = gaps.windows(2).all(|w| w[1] <= 0.7 * w[0]);
    let ok = (d1 - t1).abs() < 1e-10 && (d2 - t2).abs() < 1e-10 && monotone && shrink;
    report(
        "05 constant D closed forms",
        ok,
        format!(
            "D(1/3,β=1) gap {:.2e}, D(1/5,β=2) gap {:.2e}, limit-sequence gaps {} (monotone {monotone}, ≥30% shrink {shrink})",
            (d1 - t1).abs(),
            (d2 - t2).abs(),
            gaps.iter().map(|g| format!("{g:.3e}")).collect::<Vec<_>>().join(", ")
        ),
    );
}

#[test]
fn criterion_06_moment_oracle_agreement() {
    let spec = ProcessSpec::fbm(0.5, 1).unwrap();
    let q2 = MomentQuery::new(vec![(0.0, 1.0)], vec![2], vec![0.0], spec, 1.0).unwrap();
    let q4 = MomentQuery::new(vec![(0.0, 1.0)], vec![4], vec![0.0], spec, 1.0).unwrap();
    let m2 = limit_moment(&q2, 1 << 16, 3).unwrap();
    let m4 = limit_moment(&q4, 1 << 16, 3).unwrap();
    let t2 = (2.0 / std::f64::consts::PI).sqrt();
    let b2 = moment_upper_bound(&q2, 1.0).unwrap();
    let b4 = moment_upper_bound(&q4, 1.0).unwrap();
    let ok = (m2.value / t2 - 1.0).abs() < 5e-3
        && (m4.value / 3.0 - 1.0).abs() < 1e-2
        && m2.value <= b2
        && m4.value <= b4;
    report(
        "06 moment oracle agreement",
        ok,
        format!(
            "m2 = {:.6} (target {t2:.6}), m4 = {:.6} (target 3), bounds {b2:.4} / {b4:.4}",
            m2.value, m4.value
        ),
    );
}

fn clt_config(threads: usize) -> String {
    format!(
        "kind = verify-clt\n\
         process.family = fbm\n\
         process.h = 0.6\n\
         process.dimension = 1\n\
         f = gauss\n\
         grid.n = 16384\n\
         grid.t_max = 1.0\n\
         replications = 2000\n\
         n_list = 16,32,64,128,256\n\
         seed = 1\n\
         threads = {threads}\n"
    )
}

fn clt_report() -> &'static ExperimentReport {
    static REPORT: OnceLock<ExperimentReport> = OnceLock::new();
    REPORT.get_or_init(|| {
        let cfg = parse_config(&clt_config(8)).unwrap();
        run_experiment(&cfg).unwrap()
    })
}

fn row_pass(rep: &ExperimentReport, metric: &str, param: &str) -> bool {
    rep.rows
        .iter()
        .any(|r| r.metric == metric && r.param == param && r.pass)
}

#[test]
fn criterion_07_clt_moments() {
    let rep = clt_report();
    let ok = row_pass(rep, "var_f", "256")
        && row_pass(rep, "var_gap_regressions", "-")
        && row_pass(rep, "kurt_f", "256")
        && row_pass(rep, "skew_regressions", "-")
        && rep.passed;
    let var = rep
        .rows
        .iter()
        .find(|r| r.metric == "var_f" && r.param == "256")
        .unwrap();
    report(
        "07 law-of-F_n moments",
        ok,
        format!(
            "Var(F_256) = {:.4} vs target {:.4} (tol {:.0}%), monotone approach and 4th-moment rows pass = {}",
            var.value,
            var.target,
            var.tolerance * 100.0,
            rep.passed
        ),
    );
}

#[test]
fn criterion_08_clt_distribution() {
    let rep = clt_report();
    let ks = rep
        .rows
        .iter()
        .find(|r| r.metric == "ks_p")
        .expect("ks row present");
    report(
        "08 law-of-F_n distribution",
        ks.pass,
        format!("KS p = {:.4} (threshold {:.2}), D = {:.4}", ks.value, ks.target, ks.uncertainty),
    );
}

#[test]
fn criterion_09_degenerate_regime() {
    let cfg = parse_config(
        "kind = verify-thm3\n\
         process.family = fbm\n\
         process.h = 0.2\n\
         process.dimension = 1\n\
         f = x_gauss\n\
         grid.n = 1048576\n\
         grid.t_max = 1.0\n\
         replications = 200\n\
         n_list = 2,4,8,16\n\
         seed = 1\n\
         threads = 8\n",
    )
    .unwrap();
    let rep = run_experiment(&cfg).unwrap();
    let ratio = rep
        .rows
        .iter()
        .find(|r| r.metric == "msq_decay_ratio")
        .unwrap();
    let means: Vec<f64> = rep
        .rows
        .iter()
        .filter(|r| r.metric == "msq_gap")
        .map(|r| r.value)
        .collect();
    report(
        "09 degenerate-regime tracking",
        rep.passed,
        format!(
            "squared-gap means {} over 3 doublings, mean decay ratio {:.3} (≤ 0.8 required)",
            means.iter().map(|m| format!("{m:.3e}")).collect::<Vec<_>>().join(", "),
            ratio.value
        ),
    );
}

#[test]
fn criterion_10_determinacy() {
    // standard normal: mu_{2k} = (2k-1)!!, odd moments zero
    let mut gauss = vec![0.0; 16];
    let mut dd = 1.0;
    for k in 1..=8 {
        dd *= 2.0 * k as f64 - 1.0;
        gauss[2 * k - 1] = dd;
    }
    // lognormal: mu_k = exp(k^2/2)
    let logn: Vec<f64> = (1..=16).map(|k| ((k * k) as f64 / 2.0).exp()).collect();
    let det = determinacy_check(&[gauss]);
    let ind = determinacy_check(&[logn]);
    let ok = det.determinate && !ind.determinate;
    report(
        "10 moment determinacy",
        ok,
        format!(
            "gaussian table determinate = {}, lognormal table determinate = {}",
            det.determinate, ind.determinate
        ),
    );
}

#[test]
fn criterion_11_thread_determinism() {
    let base = render_csv(clt_report());
    let cfg = parse_config(&clt_config(3)).unwrap();
    let rerun = render_csv(&run_experiment(&cfg).unwrap());
    let ok = base == rerun;
    report(
        "11 thread-count determinism",
        ok,
        format!(
            "report.csv identical across 8 and 3 threads = {ok} ({} bytes)",
            base.len()
        ),
    );
}
