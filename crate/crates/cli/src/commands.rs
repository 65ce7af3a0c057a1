use betadim::asym::{asym_ae_dimension, asym_mu_bounds, endpoint_dims, entropy, ExactAsymModel};
use betadim::beta_maps::{validate_greedy_expansion_of_one, RandomState};
use betadim::dimension::{
    count_branches, estimate_gamma, is_unique_expansion, lebesgue_point, log_ratio, m_count, mu_dim_bounds,
    nu_ae_dimension, nu_ball_from_code, nu_dim_bounds, nu_orbit_ratios, nu_unique_dimension, Accumulator,
    Estimate, MAX_BRANCH_DEPTH,
};
use betadim::markov::{MarkovModel, DEFAULT_CLOSURE_CAP};
use betadim::numberfield::is_pisot;
use betadim::omega::Omega;
use betadim::scalar::rational_string;
use betadim::{field_from_digits, BetaField, Error, FieldElt, Rational, Scalar};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::error::CliError;
use crate::output::{Numbers, Report, Table};

/// A report plus, when one of its checks failed, the reason.
pub struct Outcome {
    pub report: Report,
    pub failure: Option<String>,
}

impl Outcome {
    fn ok(report: Report) -> Self {
        Outcome { report, failure: None }
    }
}

pub struct Ctx {
    pub seed: u64,
    pub num: Numbers,
}

/// Offset separating the point stream from the ω stream of a run.
const POINT_SEED_OFFSET: u64 = 0x9e37_79b9_7f4a_7c15;

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn obj(pairs: Vec<(&str, Value)>) -> Map<String, Value> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn estimate_json(num: &Numbers, e: &Estimate) -> Value {
    json!({
        "n": e.n,
        "mean": num.approx(e.mean),
        "std_err": num.approx(e.std_err),
        "min": num.approx(e.min),
        "max": num.approx(e.max),
    })
}

/// Exact decimal expansion of a dyadic rational.
fn dyadic_decimal(r: &Rational) -> String {
    let den = r.denom();
    let e = den.bits() - 1;
    debug_assert!(*den == BigInt::one() << e as usize);
    let scaled = r.numer() * num_traits::pow(BigInt::from(5), e as usize);
    let neg = scaled < BigInt::zero();
    let digits = if neg { (-scaled).to_string() } else { scaled.to_string() };
    let e = e as usize;
    let padded = if digits.len() <= e { format!("{}{digits}", "0".repeat(e + 1 - digits.len())) } else { digits };
    let (int, frac) = padded.split_at(padded.len() - e);
    let frac = frac.trim_end_matches('0');
    let sign = if neg { "-" } else { "" };
    if frac.is_empty() {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

fn int_poly(p: &[BigInt]) -> Value {
    json!(p.iter().map(|c| c.to_string()).collect::<Vec<_>>())
}

pub fn field(ctx: &Ctx, digits: &[u32]) -> Result<Outcome, CliError> {
    let num = &ctx.num;
    let f = field_from_digits(digits)?;
    validate_greedy_expansion_of_one(&f)?;
    let (lo, hi) = f.beta_interval();
    let (pisot, pisot_detail) = match is_pisot(&f) {
        Ok(r) => {
            let conj: Vec<Value> = r
                .conjugates
                .iter()
                .map(|c| {
                    json!({
                        "re": num.approx(c.re),
                        "im": num.approx(c.im),
                        "modulus": num.approx(c.modulus),
                        "radius": num.approx(c.radius),
                    })
                })
                .collect();
            (json!(r.pisot), json!({ "conjugates": conj }))
        }
        Err(e @ Error::Inconclusive(_)) => (Value::Null, json!({ "inconclusive": e.to_string() })),
        Err(e) => return Err(e.into()),
    };
    let beta = num.field_str(&f.beta())?;
    let mut table = Table::new(&["key", "value"]);
    table.push(vec!["digits".into(), digits.iter().map(u32::to_string).collect::<Vec<_>>().join(",")]);
    table.push(vec!["beta".into(), beta.clone()]);
    table.push(vec!["beta_lo".into(), dyadic_decimal(&lo)]);
    table.push(vec!["beta_hi".into(), dyadic_decimal(&hi)]);
    table.push(vec!["degree".into(), f.ext_degree().to_string()]);
    table.push(vec!["pisot".into(), pisot.to_string()]);
    let body = obj(vec![
        ("digits", json!(digits)),
        ("poly", int_poly(f.poly())),
        ("min_poly", int_poly(f.min_poly())),
        ("min_poly_certified", json!(f.is_exact())),
        ("degree", json!(f.ext_degree())),
        ("beta", num.field_elt(&f.beta())?),
        ("beta_interval", json!([dyadic_decimal(&lo), dyadic_decimal(&hi)])),
        ("floor", json!(f.floor())),
        ("ceil", json!(f.ceil())),
        ("greedy_expansion_of_one", json!(true)),
        ("pisot", pisot),
        ("pisot_detail", pisot_detail),
    ]);
    Ok(Outcome::ok(Report { command: "field", body, table }))
}

pub fn model(ctx: &Ctx, digits: &[u32], cap: Option<usize>, samples: usize) -> Result<Outcome, CliError> {
    let num = &ctx.num;
    let f = field_from_digits(digits)?;
    let m = MarkovModel::build_with_cap(&f, cap.unwrap_or(DEFAULT_CLOSURE_CAP))?;
    let l = m.len();
    let validation = m.validate(samples, ctx.seed);

    let fpts = m
        .f()
        .iter()
        .enumerate()
        .map(|(i, x)| Ok(json!({ "index": i, "value": num.field_elt(x)? })))
        .collect::<Result<Vec<_>, CliError>>()?;
    let cells: Vec<Value> = m
        .cells()
        .iter()
        .enumerate()
        .map(|(i, r)| {
            json!({
                "name": format!("C{}", i + 1),
                "region": r.to_string(),
                "switch": m.is_s(i),
                "left": i,
                "right": i + 1,
            })
        })
        .collect();
    let s: Vec<String> = m.s().iter().map(|i| format!("C{}", i + 1)).collect();
    let v: Vec<Value> = m.v().iter().map(|x| num.exact(x)).collect();
    let p: Vec<Vec<Value>> = m.p().iter().map(|row| row.iter().map(|x| num.exact(x)).collect()).collect();
    let checks: Vec<Value> = validation
        .checks
        .iter()
        .map(|c| json!({ "name": c.name, "passed": c.passed, "detail": c.detail }))
        .collect();

    let mut table = Table::new(&["row", "col", "a", "p"]);
    for i in 0..l {
        for j in 0..l {
            table.push(vec![(i + 1).to_string(), (j + 1).to_string(), m.a()[i][j].to_string(), rational_string(&m.p()[i][j])]);
        }
    }
    let body = obj(vec![
        ("beta_digits", json!(digits)),
        ("F", json!(fpts)),
        ("L", json!(l)),
        ("cells", json!(cells)),
        ("s", json!(s)),
        ("A", json!(m.a())),
        ("eigenvalue", json!(m.ceil())),
        ("v", json!(v)),
        ("P", json!(p)),
        ("mu_S", num.exact(&m.mu_s())),
        ("mu_C1", num.exact(&m.mu_c1())),
        ("entropy", num.approx(m.parry().entropy())),
        ("validation", json!({ "passed": validation.passed(), "checks": checks })),
    ]);
    let failure = (!validation.passed()).then(|| {
        let names: Vec<&str> = validation.failures().iter().map(|c| c.name.as_str()).collect();
        format!("model validation failed: {}", names.join(", "))
    });
    Ok(Outcome { report: Report { command: "model", body, table }, failure })
}

pub struct DimensionArgs<'a> {
    pub digits: &'a [u32],
    pub x: Option<&'a str>,
    pub k_list: Vec<usize>,
    pub samples: usize,
    pub gamma_k: Option<Vec<usize>>,
    pub gamma_samples: usize,
}

enum OrbitResult {
    Ratios { m: Vec<f64>, local: Vec<f64> },
    HitF(usize),
}

fn nu_pointwise(ratio: f64, field: &BetaField) -> f64 {
    let lb = field.ln_beta();
    (field.ceil() as f64).ln() / lb + std::f64::consts::LN_2 / lb * (1.0 - ratio)
}

pub fn dimension(ctx: &Ctx, a: DimensionArgs) -> Result<Outcome, CliError> {
    let num = &ctx.num;
    let model = MarkovModel::from_digits(a.digits)?;
    let maps = model.maps();
    let field = model.field();
    let kmax = *a.k_list.iter().max().expect("nonempty horizons");
    let x = a.x.map(|s| crate::parse::field_point(field, s)).transpose()?;
    if let Some(x) = &x {
        if !maps.contains(x)? {
            return Err(Error::OutOfDomain.into());
        }
    }

    let results = (0..a.samples)
        .into_par_iter()
        .map(|i| -> Result<OrbitResult, Error> {
            match &x {
                None => {
                    let m = nu_orbit_ratios(maps, kmax, &a.k_list, &mut rng(ctx.seed, i as u64))?;
                    Ok(OrbitResult::Ratios { m, local: Vec::new() })
                }
                Some(x) => {
                    let mut st = RandomState::new(Omega::split(ctx.seed, i as u64), x.clone());
                    match m_count(&model, &mut st, kmax) {
                        Ok(s) => {
                            let m = a.k_list.iter().map(|&k| s.m[k - 1] as f64 / k as f64).collect();
                            let local = a
                                .k_list
                                .iter()
                                .map(|&k| log_ratio(&nu_ball_from_code(&model, &s.alpha[..k]), k, field.ln_beta()))
                                .collect();
                            Ok(OrbitResult::Ratios { m, local })
                        }
                        Err(Error::HitF { step }) => Ok(OrbitResult::HitF(step)),
                        Err(e) => Err(e),
                    }
                }
            }
        })
        .collect::<Result<Vec<_>, Error>>()?;

    let mut per_k = vec![Accumulator::default(); a.k_list.len()];
    let mut local_k = vec![Accumulator::default(); a.k_list.len()];
    let mut hits = Vec::new();
    for r in &results {
        match r {
            OrbitResult::Ratios { m, local } => {
                for (acc, v) in per_k.iter_mut().zip(m) {
                    acc.push(*v);
                }
                for (acc, v) in local_k.iter_mut().zip(local) {
                    acc.push(*v);
                }
            }
            OrbitResult::HitF(step) => hits.push(*step),
        }
    }
    let est: Vec<Estimate> = per_k.iter().map(Accumulator::estimate).collect();
    let mut table = Table::new(&["k", "m_ratio_mean", "m_ratio_std_err", "nu_dim_proxy"]);
    let mut m_ratio = Vec::new();
    for (&k, e) in a.k_list.iter().zip(&est) {
        if e.n > 0 {
            table.push(vec![
                k.to_string(),
                num.float_str(e.mean),
                num.float_str(e.std_err),
                num.float_str(nu_pointwise(e.mean, field)),
            ]);
        }
        m_ratio.push(json!({ "k": k, "estimate": estimate_json(num, e) }));
    }
    let bounds = if est.iter().all(|e| e.n > 0) {
        let hi = est.iter().map(|e| e.mean).fold(f64::NEG_INFINITY, f64::max);
        let lo = est.iter().map(|e| e.mean).fold(f64::INFINITY, f64::min);
        let r = nu_dim_bounds(hi, lo, field)?;
        json!({ "lower": num.approx(r.lower), "upper": num.approx(r.upper) })
    } else {
        Value::Null
    };

    let (gamma_json, mu_json) = match &a.gamma_k {
        None => (Value::Null, Value::Null),
        Some(gk) => {
            let g = estimate_gamma(maps, a.gamma_samples, gk, ctx.seed)?;
            let lb = field.ln_beta();
            let lc = (field.ceil() as f64).ln();
            let ests: Vec<Value> = g
                .estimates
                .iter()
                .map(|e| {
                    json!({
                        "k": e.k,
                        "gamma": estimate_json(num, &e.estimate),
                        "mu_dim_proxy": num.approx((lc - e.estimate.mean) / lb),
                    })
                })
                .collect();
            let last = g.estimates.last().map(|e| e.estimate.mean);
            let mu = match (&x, last) {
                (Some(x), Some(gamma)) if kmax <= MAX_BRANCH_DEPTH => {
                    let n = count_branches(maps, x, kmax)?.n();
                    let r = mu_dim_bounds(field, &n, &a.k_list, Some(gamma))?;
                    json!({
                        "lower": num.approx(r.lower),
                        "upper": num.approx(r.upper),
                        "ae_value": num.approx_opt(r.ae_value),
                        "unique_value": num.approx_opt(r.unique_value),
                    })
                }
                _ => Value::Null,
            };
            (
                json!({ "estimates": ests, "samples": g.samples, "pisot": g.pisot, "ae_guarantee": g.ae_guarantee, "trend": g.trend }),
                mu,
            )
        }
    };

    let local_json = if x.is_some() {
        let v: Vec<Value> = a
            .k_list
            .iter()
            .zip(&local_k)
            .map(|(&k, acc)| json!({ "k": k, "estimate": estimate_json(num, &acc.estimate()) }))
            .collect();
        json!(v)
    } else {
        Value::Null
    };
    let x_json = match &x {
        Some(x) => num.field_elt(x)?,
        None => json!("nu-random"),
    };
    let body = obj(vec![
        ("beta_digits", json!(a.digits)),
        ("metric", json!("rho")),
        ("x", x_json),
        ("k_list", json!(a.k_list)),
        ("samples", json!(a.samples)),
        ("seeds", json!({ "base": ctx.seed, "streams": a.samples })),
        ("m_ratio", json!(m_ratio)),
        ("local_dim_proxy", local_json),
        ("hit_f_steps", json!(hits)),
        ("bounds", bounds),
        ("ae_value", num.approx(nu_ae_dimension(&model))),
        ("unique_value", num.approx(nu_unique_dimension(field))),
        ("gamma_estimates", gamma_json),
        ("mu_bounds", mu_json),
    ]);
    Ok(Outcome::ok(Report { command: "dimension", body, table }))
}

pub fn count(ctx: &Ctx, digits: &[u32], x: &str, k: usize) -> Result<Outcome, CliError> {
    let num = &ctx.num;
    let f = field_from_digits(digits)?;
    let maps = betadim::beta_maps::BetaMaps::new(&f)?;
    let x = crate::parse::field_point(&f, x)?;
    if !maps.contains(&x)? {
        return Err(Error::OutOfDomain.into());
    }
    let n = count_branches(&maps, &x, k)?.n();
    let logs: Vec<f64> = n.iter().enumerate().map(|(i, &nk)| (nk as f64).ln() / (i + 1) as f64).collect();
    let mu = mu_dim_bounds(&f, &n, &[k], None)?;
    let unique = is_unique_expansion(&maps, &x, k)?;
    let mut table = Table::new(&["k", "n", "log_n_over_k"]);
    for (i, (nk, l)) in n.iter().zip(&logs).enumerate() {
        table.push(vec![(i + 1).to_string(), nk.to_string(), num.float_str(*l)]);
    }
    let body = obj(vec![
        ("beta_digits", json!(digits)),
        ("x", num.field_elt(&x)?),
        ("k", json!(k)),
        ("n", json!(n.iter().map(|v| num.exact_int(v)).collect::<Vec<_>>())),
        ("log_n_over_k", json!(logs.iter().map(|&v| num.approx(v)).collect::<Vec<_>>())),
        ("mu_dim_proxy", num.approx(mu.lower)),
        ("unique_expansion", serde_json::to_value(unique).map_err(|e| CliError::Io(e.to_string()))?),
    ]);
    Ok(Outcome::ok(Report { command: "count", body, table }))
}

pub fn gamma(ctx: &Ctx, digits: &[u32], k_list: &[usize], samples: usize) -> Result<Outcome, CliError> {
    let num = &ctx.num;
    let f = field_from_digits(digits)?;
    let maps = betadim::beta_maps::BetaMaps::new(&f)?;
    let g = estimate_gamma(&maps, samples, k_list, ctx.seed)?;
    let lb = f.ln_beta();
    let lc = (f.ceil() as f64).ln();
    let mut table = Table::new(&["k", "gamma_mean", "gamma_std_err", "mu_dim_proxy"]);
    let mut ests = Vec::new();
    for e in &g.estimates {
        let proxy = (lc - e.estimate.mean) / lb;
        table.push(vec![e.k.to_string(), num.float_str(e.estimate.mean), num.float_str(e.estimate.std_err), num.float_str(proxy)]);
        ests.push(json!({ "k": e.k, "gamma": estimate_json(num, &e.estimate), "mu_dim_proxy": num.approx(proxy) }));
    }
    let body = obj(vec![
        ("beta_digits", json!(digits)),
        ("samples", json!(samples)),
        ("seeds", json!({ "base": ctx.seed, "streams": samples })),
        ("estimates", json!(ests)),
        ("pisot", json!(g.pisot)),
        ("ae_guarantee", json!(g.ae_guarantee)),
        ("trend", json!(g.trend)),
    ]);
    Ok(Outcome::ok(Report { command: "gamma", body, table }))
}

pub struct SimulateArgs<'a> {
    pub digits: &'a [u32],
    pub x: Option<&'a str>,
    pub k: usize,
    pub orbits: usize,
    pub every: usize,
}

pub fn simulate(ctx: &Ctx, a: SimulateArgs) -> Result<Outcome, CliError> {
    let num = &ctx.num;
    let model = MarkovModel::from_digits(a.digits)?;
    let maps = model.maps();
    let fixed = a.x.map(|s| crate::parse::field_point(model.field(), s)).transpose()?;
    if let Some(x) = &fixed {
        if !maps.contains(x)? {
            return Err(Error::OutOfDomain.into());
        }
    }
    let every = a.every.max(1);
    let runs = (0..a.orbits)
        .into_par_iter()
        .map(|i| -> Result<(FieldElt, Result<Vec<u32>, usize>), Error> {
            let x = match &fixed {
                Some(x) => x.clone(),
                None => lebesgue_point(maps, &mut rng(ctx.seed.wrapping_add(POINT_SEED_OFFSET), i as u64)),
            };
            let mut st = RandomState::new(Omega::split(ctx.seed, i as u64), x.clone());
            match m_count(&model, &mut st, a.k) {
                Ok(s) => Ok((x, Ok(s.m))),
                Err(Error::HitF { step }) => Ok((x, Err(step))),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<_>, Error>>()?;

    let mut table = Table::new(&["stream", "k", "m_k", "ratio"]);
    let mut traces = Vec::new();
    for (i, (x, r)) in runs.iter().enumerate() {
        let xj = num.field_elt(x)?;
        match r {
            Ok(m) => {
                let mut pts = Vec::new();
                for (j, &mj) in m.iter().enumerate() {
                    let k = j + 1;
                    if k % every == 0 || k == m.len() {
                        let ratio = mj as f64 / k as f64;
                        table.push(vec![i.to_string(), k.to_string(), mj.to_string(), num.float_str(ratio)]);
                        pts.push(json!({ "k": k, "m_k": mj, "ratio": num.approx(ratio) }));
                    }
                }
                let last = m.last().map_or(0.0, |&v| v as f64 / m.len() as f64);
                traces.push(json!({ "stream": i, "x": xj, "final_ratio": num.approx(last), "points": pts }));
            }
            Err(step) => traces.push(json!({ "stream": i, "x": xj, "hit_f_step": step })),
        }
    }
    let body = obj(vec![
        ("beta_digits", json!(a.digits)),
        ("k", json!(a.k)),
        ("orbits", json!(a.orbits)),
        ("every", json!(every)),
        ("seeds", json!({ "base": ctx.seed, "streams": a.orbits })),
        ("mu_S", num.exact(&model.mu_s())),
        ("traces", json!(traces)),
    ]);
    Ok(Outcome::ok(Report { command: "simulate", body, table }))
}

pub fn asym(ctx: &Ctx, p: &Rational, k: usize, gamma: Option<f64>, grid: usize) -> Result<Outcome, CliError> {
    let num = &ctx.num;
    let m = ExactAsymModel::new(p.clone())?;
    let pf = m.verify_pushforward(k)?;
    let pf64 = p.to_f64();
    let (d0, d1) = endpoint_dims(pf64)?;
    let bounds = match gamma {
        Some(g) => {
            let r = asym_mu_bounds(pf64, g)?;
            json!({ "gamma": num.approx(g), "lower": num.approx(r.lower), "upper": num.approx(r.upper) })
        }
        None => Value::Null,
    };
    let mut table = Table::new(&["p", "ae_dimension", "endpoint_dim_0", "endpoint_dim_beta"]);
    for i in 1..=grid {
        let pi = Rational::new(BigInt::from(i), BigInt::from(grid + 1));
        let mi = ExactAsymModel::new(pi.clone())?;
        let (e0, e1) = endpoint_dims(pi.to_f64())?;
        table.push(vec![rational_string(&pi), num.float_str(asym_ae_dimension(&mi)), num.float_str(e0), num.float_str(e1)]);
    }
    let pm: Vec<Vec<Value>> = m.transition().iter().map(|r| r.iter().map(|x| num.exact(x)).collect()).collect();
    let failure_word = pf.failure.as_ref().map(|w| w.iter().map(u8::to_string).collect::<String>());
    let body = obj(vec![
        ("p", num.exact(p)),
        ("u", json!(m.u().iter().map(|x| num.exact(x)).collect::<Vec<_>>())),
        ("P_p", json!(pm)),
        ("stationary", json!(m.is_stationary())),
        ("pushforward_checked_to", json!(pf.checked_to)),
        (
            "pushforward",
            json!({
                "result": if pf.success() { "success" } else { "failure" },
                "cylinders": pf.cylinders,
                "failure": failure_word,
            }),
        ),
        ("entropy", num.approx(entropy(pf64))),
        ("ae_dimension", num.approx(asym_ae_dimension(&m))),
        ("endpoint_dims", json!([num.approx(d0), num.approx(d1)])),
        ("bounds", bounds),
    ]);
    let failure = (!pf.success()).then(|| format!("pushforward mismatch at word {}", failure_word.unwrap_or_default()));
    Ok(Outcome { report: Report { command: "asym", body, table }, failure })
}
