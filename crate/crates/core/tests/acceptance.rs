//! Acceptance suite: one test per criterion, each printing a single
//! `criterion N [PASS|FAIL]` line. Run with
//! `cargo test -p betadim --test acceptance -- --nocapture --test-threads 1`.

mod common;

use std::time::{Duration, Instant};

use betadim::asym::{asym_ae_dimension, endpoint_dims, weighted_branch_count, ExactAsymModel};
use betadim::beta_maps::RandomState;
use betadim::dimension::*;
use betadim::markov::MarkovModel;
use betadim::numberfield::is_pisot;
use betadim::omega::Omega;
use betadim::{field_from_digits, Error, Rational};
use common::{point, q};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(n: u32, name: &str, passed: bool, detail: &str, elapsed: Duration, budget: Duration) {
    let ok = passed && elapsed <= budget;
    println!(
        "criterion {n} [{}] {name}: {detail} ({:.3}s, budget {}s)",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        budget.as_secs()
    );
    assert!(ok, "criterion {n} failed: {detail}");
}

fn same_12_digits(a: f64, b: f64) -> bool {
    format!("{a:.11e}") == format!("{b:.11e}")
}

fn golden_ln() -> f64 {
    ((1.0 + 5f64.sqrt()) / 2.0).ln()
}

#[test]
fn criterion_1_golden_pipeline() {
    let t = Instant::now();
    let m = MarkovModel::from_digits(&[1, 1]).unwrap();
    let f = m.field().clone();
    let inv = f.beta().inv().unwrap();
    let h = q(1, 2);
    let z = q(0, 1);
    let third = q(1, 3);
    let checks = [
        ("F", m.f() == [f.zero(), inv, f.one(), f.beta()]),
        ("L", m.len() == 3),
        ("A", m.a() == [vec![1, 1, 0], vec![1, 0, 1], vec![0, 1, 1]]),
        ("v", m.v() == [third.clone(), third.clone(), third.clone()]),
        (
            "P",
            m.p() == [
                vec![h.clone(), h.clone(), z.clone()],
                vec![h.clone(), z.clone(), h.clone()],
                vec![z.clone(), h.clone(), h.clone()],
            ],
        ),
        ("mu_S", m.mu_s() == third),
        ("mu_C1", m.mu_c1() == third),
    ];
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    let detail = if failed.is_empty() { "F, L, A, v, P, mu_S, mu_C1 exact".to_string() } else { format!("mismatch in {failed:?}") };
    report(1, "golden exact pipeline", failed.is_empty(), &detail, t.elapsed(), Duration::from_secs(1));
}

#[test]
fn criterion_2_structural_validations() {
    let t = Instant::now();
    let mut failures = Vec::new();
    for d in [vec![1, 1], vec![1, 1, 1], vec![2, 1]] {
        let m = MarkovModel::from_digits(&d).unwrap();
        let v = m.validate(1000, 2024);
        for c in v.failures() {
            failures.push(format!("{d:?}: {}", c.name));
        }
    }
    let detail = if failures.is_empty() {
        "p3, p5, Av, vP, stochastic, mirror, Q-additivity on golden/tribonacci/(2,1)".to_string()
    } else {
        failures.join("; ")
    };
    report(2, "structural validations", failures.is_empty(), &detail, t.elapsed(), Duration::from_secs(10));
}

#[test]
fn criterion_3_counting_identity() {
    let t = Instant::now();
    let m = MarkovModel::from_digits(&[1, 1]).unwrap();
    let maps = m.maps();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut xs = Vec::new();
    while xs.len() < 20 {
        let (n0, n1, d) = (rng.random_range(-80..80), rng.random_range(-80..80), rng.random_range(1..60));
        if let Some(x) = point(maps, n0, n1, d) {
            xs.push(x);
        }
    }
    let mut cases = 0;
    let mut bad = 0;
    for x in &xs {
        let n = count_branches(maps, x, 12).unwrap().n();
        let avg = omega_average_sequence(maps, x, 12).unwrap();
        for (nk, a) in n.iter().zip(&avg) {
            cases += 1;
            if Rational::from_integer(BigInt::from(*nk)) != *a {
                bad += 1;
            }
        }
    }
    report(
        3,
        "N_k = exhaustive omega average",
        bad == 0,
        &format!("{} of {cases} (x, k) cases agree, 20 points, k <= 12", cases - bad),
        t.elapsed(),
        Duration::from_secs(120),
    );
}

#[test]
fn criterion_4_ae_constant() {
    let t = Instant::now();
    let m = MarkovModel::from_digits(&[1, 1]).unwrap();
    let est = nu_monte_carlo(m.maps(), 10_000, 200, 4).unwrap();
    let mc_ok = (est.mean - 1.0 / 3.0).abs() <= 0.01;
    let ae = nu_ae_dimension(&m);
    let oracle = (2f64.ln() / golden_ln()) * (2.0 - 1.0 / 3.0);
    let ae_ok = same_12_digits(ae, oracle) && (ae - 2.40070).abs() < 5e-6;
    report(
        4,
        "ergodic a.e. constant",
        mc_ok && ae_ok,
        &format!("mean M_k/k = {:.5} (se {:.5}), ae dimension = {ae:.11}", est.mean, est.std_err),
        t.elapsed(),
        Duration::from_secs(60),
    );
}

#[test]
fn criterion_5_unique_expansion() {
    let t = Instant::now();
    let m = MarkovModel::from_digits(&[1, 1]).unwrap();
    let f = m.field().clone();
    let lb = golden_ln();
    let target = (2f64.ln() + 2f64.ln()) / lb;
    let bounds = nu_dim_bounds(0.0, 0.0, &f).unwrap();
    let bounds_ok = same_12_digits(bounds.lower, target) && same_12_digits(bounds.upper, target);
    let k = 50;
    let mut st = RandomState::new(Omega::seeded(5), f.zero());
    let nu = nu_ball_measure(&m, &mut st, k).unwrap();
    let expected = Rational::new(BigInt::from(1), BigInt::from(1) << (k - 1)) * &m.v()[0]
        / Rational::from_integer(BigInt::from(1) << k)
        * m.mu_c1();
    let exact_ok = nu == expected;
    let ratio = log_ratio(&nu, k, f.ln_beta());
    let conv_ok = (ratio - target).abs() <= 0.05;
    report(
        5,
        "unique-expansion value",
        bounds_ok && exact_ok && conv_ok,
        &format!(
            "bounds(0,0) = {:.11}, ball mass exact = {exact_ok}, log-ratio at k=50 = {ratio:.5} vs {target:.5} (|diff| = {:.5}, tol 0.05)",
            bounds.lower,
            (ratio - target).abs()
        ),
        t.elapsed(),
        Duration::from_secs(10),
    );
}

#[test]
fn criterion_6_degenerate_points() {
    let t = Instant::now();
    let m = MarkovModel::from_digits(&[1, 1]).unwrap();
    let f = m.field().clone();
    let mut st = RandomState::new(Omega::periodic(&[1, 0]), f.one());
    let dim = nu_local_dim_proxy(&m, &mut st, 20).unwrap();
    let mut st = RandomState::new(Omega::periodic(&[1, 0]), f.one());
    let ball = nu_ball_measure(&m, &mut st, 20);
    let s = m.s()[0];
    let qss = m.cylinder_q(&[s, s]);
    let ok = dim == LocalDim::Infinite { hit_step: 1 } && ball == Err(Error::HitF { step: 1 }) && qss == q(0, 1);
    report(
        6,
        "degenerate points",
        ok,
        &format!("((10)bar, 1): {dim:?}, ball: {ball:?}, Q([s s]) = {qss}"),
        t.elapsed(),
        Duration::from_secs(10),
    );
}

#[test]
fn criterion_7_asymmetric_suite() {
    let t = Instant::now();
    let m = MarkovModel::from_digits(&[1, 1]).unwrap();
    let maps = m.maps();
    let f = m.field().clone();
    let mut notes = Vec::new();
    let mut ok = true;
    for p in [q(1, 2), q(1, 3), q(2, 5)] {
        let r = ExactAsymModel::new(p.clone()).unwrap().verify_pushforward(10).unwrap();
        ok &= r.success() && r.cylinders == 2046;
        notes.push(format!("pushforward p={p}: {} cylinders", r.cylinders));
    }
    let xs = [f.rational(&q(1, 2)), f.rational(&q(2, 7)), f.rational(&q(13, 10)), f.zero()];
    let ps = [q(1, 4), q(1, 2), q(2, 3)];
    let mut agree = 0;
    let mut total = 0;
    for x in &xs {
        let n = count_branches(maps, x, 10).unwrap().n();
        for k in 1..=10 {
            let vals: Vec<Rational> = ps.iter().map(|p| weighted_branch_count(maps, x, k, p).unwrap()).collect();
            total += 1;
            if vals.iter().all(|v| *v == Rational::from_integer(BigInt::from(n[k - 1]))) {
                agree += 1;
            }
        }
    }
    ok &= agree == total;
    notes.push(format!("weighted counts p-independent and = N_k in {agree}/{total}"));
    let sym = nu_ae_dimension(&m);
    let asym = asym_ae_dimension(&ExactAsymModel::new(q(1, 2)).unwrap());
    ok &= same_12_digits(sym, asym);
    notes.push(format!("ae(1/2) = {asym:.11} vs {sym:.11}"));
    let (d0, d1) = endpoint_dims(0.5).unwrap();
    let l = 2f64.ln() / golden_ln();
    ok &= same_12_digits(d0, l) && same_12_digits(d1, l);
    notes.push(format!("endpoint dims ({d0:.11}, {d1:.11})"));
    report(7, "asymmetric golden suite", ok, &notes.join("; "), t.elapsed(), Duration::from_secs(120));
}

#[test]
fn criterion_8_gamma_estimation() {
    let t = Instant::now();
    let m = MarkovModel::from_digits(&[1, 1]).unwrap();
    let ln2 = 2f64.ln();
    let lb = golden_ln();
    let mu_s = 1.0 / 3.0;
    let g = estimate_gamma(m.maps(), 50, &[12, 16, 20], 8).unwrap();
    let mut ok = true;
    let mut notes = Vec::new();
    for e in &g.estimates {
        let gk = e.estimate.mean;
        let in_bracket = mu_s * ln2 - 0.02 <= gk && gk <= ln2;
        let dim = (ln2 - gk) / lb;
        let dim_ok = dim > 0.0 && dim <= ln2 / lb;
        ok &= in_bracket && dim_ok;
        notes.push(format!("k={}: gamma {gk:.5} (se {:.5}) in [{:.5}, {ln2:.5}] = {in_bracket}, dim proxy {dim:.5}", e.k, e.estimate.std_err, mu_s * ln2 - 0.02));
    }
    let maps = betadim::beta_maps::BetaMaps::new(&field_from_digits(&[3, 1, 2, 3]).unwrap()).unwrap();
    let np = estimate_gamma(&maps, 4, &[6, 8], 8).unwrap();
    let flag_ok = !np.ae_guarantee && np.pisot == Some(false);
    ok &= flag_ok;
    notes.push(format!("(3,1,2,3) no-guarantee flag = {flag_ok}"));
    report(8, "gamma estimation", ok, &notes.join("; "), t.elapsed(), Duration::from_secs(300));
}

#[test]
fn criterion_9_pisot_classifier() {
    let t = Instant::now();
    let mut ok = true;
    let mut notes = Vec::new();
    for (d, want) in [
        (vec![1, 1], true),
        (vec![1, 1, 1], true),
        (vec![2, 1], true),
        (vec![3, 1], true),
        (vec![3, 1, 2, 3], false),
    ] {
        let got = is_pisot(&field_from_digits(&d).unwrap()).map(|r| r.pisot);
        ok &= got == Ok(want);
        notes.push(format!("{d:?} -> {got:?}"));
    }
    report(9, "Pisot classifier", ok, &notes.join(", "), t.elapsed(), Duration::from_secs(10));
}
