//! Acceptance suite: one PASS/FAIL line per criterion, then a determinism
//! pass that reruns every criterion and compares CSV bytes.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use contraction_core::concentration::{phi_a_box, phi_a_waterfill, phi_a_waterfill_with_tail};
use contraction_core::density::{pcn_posterior, DensityLikelihood, PcnConfig};
use contraction_core::gaussian::{covariance_rl_type, FiniteGaussian, RLTypeParams, SeriesPrior};
use contraction_core::rng::stream;
use contraction_core::sequences::{worst_case_coeff, worst_case_tail, FourierFunction};
use contraction_core::stats::{variance_std_error, Moments};
use contraction_core::whitenoise::{observe, posterior};
use contraction_lab::{execute, Prov, RunConfig, RunOutput, Table};
use nalgebra::{DMatrix, DVector};
use rand::Rng;

const SEED: u64 = 20_240_611;

/// Criteria expected to fail at the stated settings; see the notes in the
/// README.
const KNOWN_FAILURES: &[usize] = &[3];

struct Outcome {
    passed: bool,
    detail: String,
    csv: String,
}

#[derive(Default)]
struct Ctx {
    /// Profile name and whether it passed the invariant checks.
    profiles: Vec<(String, bool)>,
}

fn p0(k: usize, n: u64) -> Prov {
    Prov { seed: SEED, replicate: 0, k, n }
}

fn run(name: &str, pairs: &[(&str, &str)]) -> RunOutput {
    let cfg = RunConfig::from_pairs(name, pairs, SEED).unwrap_or_else(|e| panic!("{name}: {e}"));
    execute(&cfg).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn weights(alpha: f64, k: usize) -> Vec<f64> {
    SeriesPrior::new(alpha, k).unwrap().rkhs_weights()
}

/// Projected gradient on `Σ w h²` over the ball `‖h - f‖ ≤ ε`.
fn projected_gradient(w: &[f64], f: &[f64], eps: f64) -> f64 {
    let step = 1.0 / (2.0 * w.iter().cloned().fold(0.0, f64::max));
    let project = |h: &mut Vec<f64>| {
        let d = h.iter().zip(f).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        if d > eps {
            h.iter_mut().zip(f).for_each(|(a, b)| *a = b + (*a - b) * eps / d);
        }
    };
    let value = |h: &[f64]| h.iter().zip(w).map(|(a, b)| b * a * a).sum::<f64>();
    let mut h = f.to_vec();
    project(&mut h);
    let mut last = value(&h);
    for it in 0..20_000_000u64 {
        for (a, b) in h.iter_mut().zip(w) {
            *a -= step * 2.0 * b * *a;
        }
        project(&mut h);
        if it % 1000 == 999 {
            let v = value(&h);
            if (last - v).abs() <= 1e-15 * v.max(1e-300) {
                return v;
            }
            last = v;
        }
    }
    value(&h)
}

fn c1_waterfill(_: &mut Ctx) -> Outcome {
    let mut rng = stream(SEED, 1);
    let mut t = Table::new(&["alpha", "epsilon", "value", "oracle", "rel_error", "kkt"]);
    let (mut worst_rel, mut worst_kkt) = (0.0f64, 0.0f64);
    for i in 0..50 {
        let alpha = [0.5, 1.0, 2.0][i % 3];
        let eps = rng.random_range(0.05..0.5);
        let f: Vec<f64> = (0..8).map(|_| rng.random_range(-1.0..1.0)).collect();
        let w = weights(alpha, 8);
        let s = phi_a_waterfill(&w, &FourierFunction::new(f.clone()).unwrap(), eps).unwrap();
        let oracle = projected_gradient(&w, &f, eps);
        let rel = (s.value - oracle).abs() / oracle.abs().max(1e-300);
        let kkt = s.kkt_residual(&w, &f, eps);
        worst_rel = worst_rel.max(rel);
        worst_kkt = worst_kkt.max(kkt);
        t.push(Prov { replicate: i, ..p0(8, 0) }, vec![alpha.into(), eps.into(), s.value.into(), oracle.into(), rel.into(), kkt.into()]);
    }
    Outcome {
        passed: worst_rel < 1e-6 && worst_kkt < 1e-8,
        detail: format!("max rel error {worst_rel:.2e}, max KKT residual {worst_kkt:.2e}"),
        csv: t.to_csv(),
    }
}

/// Minimum of `hᵀ P h` over the box by enumerating all 3^d active sets.
fn enumerate_box(p: &DMatrix<f64>, lo: &[f64], hi: &[f64]) -> f64 {
    let d = lo.len();
    let mut best = f64::INFINITY;
    for code in 0..3usize.pow(d as u32) {
        let mut state = vec![0u8; d];
        let mut c = code;
        for s in state.iter_mut() {
            *s = (c % 3) as u8;
            c /= 3;
        }
        let free: Vec<usize> = (0..d).filter(|&i| state[i] == 0).collect();
        let mut h = DVector::from_fn(d, |i, _| match state[i] {
            1 => lo[i],
            2 => hi[i],
            _ => 0.0,
        });
        if !free.is_empty() {
            let fixed: Vec<usize> = (0..d).filter(|&i| state[i] != 0).collect();
            let pff = DMatrix::from_fn(free.len(), free.len(), |a, b| p[(free[a], free[b])]);
            let rhs = DVector::from_fn(free.len(), |a, _| -fixed.iter().map(|&j| p[(free[a], j)] * h[j]).sum::<f64>());
            let x = pff.cholesky().expect("positive definite block").solve(&rhs);
            for (a, &i) in free.iter().enumerate() {
                h[i] = x[a];
            }
        }
        let feasible = (0..d).all(|i| h[i] >= lo[i] - 1e-12 && h[i] <= hi[i] + 1e-12);
        if feasible {
            best = best.min(h.dot(&(p * &h)));
        }
    }
    best
}

fn c2_box(_: &mut Ctx) -> Outcome {
    let mut rng = stream(SEED, 2);
    let mut t = Table::new(&["dim", "epsilon", "value", "oracle", "rel_error"]);
    let mut worst = 0.0f64;
    for i in 0..30 {
        let d = 2 + i % 5;
        let a = DMatrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0));
        let cov = &a * a.transpose() / d as f64 + DMatrix::identity(d, d) * 0.2;
        let g = FiniteGaussian::from_covariance(cov.clone()).unwrap();
        let f0: Vec<f64> = (0..d).map(|_| rng.random_range(-1.5..1.5)).collect();
        let eps = rng.random_range(0.05..0.8);
        let s = phi_a_box(&g, &f0, eps).unwrap();
        let p = cov.try_inverse().unwrap();
        let lo: Vec<f64> = f0.iter().map(|c| c - eps).collect();
        let hi: Vec<f64> = f0.iter().map(|c| c + eps).collect();
        let oracle = enumerate_box(&p, &lo, &hi);
        let rel = (s.value - oracle).abs() / oracle.abs().max(1e-12);
        worst = worst.max(rel);
        t.push(Prov { replicate: i, ..p0(d, 0) }, vec![d.into(), eps.into(), s.value.into(), oracle.into(), rel.into()]);
    }
    Outcome { passed: worst < 1e-6, detail: format!("max rel error {worst:.2e}"), csv: t.to_csv() }
}

fn slope_and_profile(ctx: &mut Ctx, label: &str, out: &RunOutput) -> f64 {
    let ok = out.summary["profile"]["invariants_passed"].as_bool().unwrap();
    ctx.profiles.push((label.to_string(), ok));
    out.summary["slope"].as_f64().unwrap()
}

fn c3_small_ball(ctx: &mut Ctx) -> Outcome {
    let eps = "0.3,0.2,0.1,0.05";
    let mut csv = String::new();
    let mut slopes = Vec::new();
    for alpha in ["0.5", "1"] {
        let out = run("small-ball", &[("alpha", alpha), ("k", "200"), ("epsilons", eps), ("method", "tilted-mc"), ("samples", "1000000")]);
        slopes.push(slope_and_profile(ctx, &format!("small-ball alpha={alpha}"), &out));
        csv.push_str(&out.table.to_csv());
    }
    // truncation diagnostics: the same slope with K raised, by cf inversion
    let mut diag = Vec::new();
    for k in ["2000", "20000"] {
        let out = run("small-ball", &[("alpha", "0.5"), ("k", k), ("epsilons", eps), ("method", "cf-inversion")]);
        diag.push(format!("K={k}: {:.3}", out.summary["slope"].as_f64().unwrap()));
        csv.push_str(&out.table.to_csv());
    }
    let ok_half = (slopes[0] + 2.0).abs() <= 0.3;
    let ok_one = (slopes[1] + 1.0).abs() <= 0.2;
    Outcome {
        passed: ok_half && ok_one,
        detail: format!(
            "slope alpha=1/2 {:.3} (target -2 ± 0.3), alpha=1 {:.3} (target -1 ± 0.2); alpha=1/2 cf diagnostics {}",
            slopes[0],
            slopes[1],
            diag.join(", ")
        ),
        csv,
    }
}

fn c4_sandwich(ctx: &mut Ctx) -> Outcome {
    let base = [("alpha", "1"), ("f0", "0.5,0.25"), ("epsilons", "0.3,0.5"), ("samples", "1000000")];
    let honest = run("sandwich", &base);
    let with = |mode: &'static str| {
        let mut p = base.to_vec();
        p.push(("corruption", mode));
        run("sandwich", &p)
    };
    let corrupt = with("phi");
    let corrupt_a = with("phi-a");
    let profile = run("concentration", &[("alpha", "1"), ("f0", "0.5,0.25"), ("epsilons", "0.5,0.4,0.3,0.25,0.2,0.15"), ("samples", "1000000")]);
    ctx.profiles.push(("concentration alpha=1 f0=(0.5,0.25)".into(), profile.summary["invariants_passed"].as_bool().unwrap()));
    let holds = |o: &RunOutput| o.summary["all_hold"].as_bool().unwrap();
    let l_hat = honest.table.column("l_hat");
    let lower = honest.table.column("lower");
    let upper = honest.table.column("upper");
    let mut csv = honest.table.to_csv();
    csv.push_str(&corrupt.table.to_csv());
    csv.push_str(&corrupt_a.table.to_csv());
    csv.push_str(&profile.table.to_csv());
    Outcome {
        passed: holds(&honest) && !holds(&corrupt),
        detail: format!(
            "eps=0.3: {:.3} in [{:.3}, {:.3}]; eps=0.5: {:.3} in [{:.3}, {:.3}]; phi x2 control {}; phi_A x2 control {} (informational)",
            l_hat[0],
            lower[0],
            upper[0],
            l_hat[1],
            lower[1],
            upper[1],
            if holds(&corrupt) { "not rejected" } else { "rejected" },
            if holds(&corrupt_a) { "not rejected" } else { "rejected" },
        ),
        csv,
    }
}

fn c5_profiles(ctx: &mut Ctx) -> Outcome {
    let mut t = Table::new(&["profile", "passed"]);
    for (name, ok) in &ctx.profiles {
        t.push(p0(0, 0), vec![name.as_str().into(), (*ok).into()]);
    }
    let bad: Vec<&str> = ctx.profiles.iter().filter(|p| !p.1).map(|p| p.0.as_str()).collect();
    Outcome {
        passed: !ctx.profiles.is_empty() && bad.is_empty(),
        detail: format!("{} profiles checked, failing: {:?}", ctx.profiles.len(), bad),
        csv: t.to_csv(),
    }
}

/// Per-n means and standard errors of a column, in order of first appearance.
fn grouped(t: &Table, key: &str, col: &str) -> Vec<(f64, f64, f64)> {
    let keys = t.column(key);
    let vals = t.column(col);
    let mut order: Vec<f64> = Vec::new();
    for &k in &keys {
        if !order.contains(&k) {
            order.push(k);
        }
    }
    order
        .into_iter()
        .map(|k| {
            let xs: Vec<f64> = keys.iter().zip(&vals).filter(|(a, _)| **a == k).map(|(_, v)| *v).collect();
            let m = Moments::from_slice(&xs);
            (k, m.mean(), m.std_error())
        })
        .collect()
}

fn monotone(g: &[(f64, f64, f64)], up: bool, slack: f64) -> bool {
    g.windows(2).all(|w| {
        let tol = 2.0 * (w[0].2.powi(2) + w[1].2.powi(2)).sqrt() + slack;
        if up {
            w[1].1 >= w[0].1 - tol
        } else {
            w[1].1 <= w[0].1 + tol
        }
    })
}

fn c6_ring(_: &mut Ctx) -> Outcome {
    let out = run(
        "ring",
        &[("alpha", "1"), ("beta", "1"), ("f0_power", "1.6"), ("ns", "1000,10000,100000"), ("replicates", "200"), ("outer", "3"), ("inner", "0.05")],
    );
    let outer = grouped(&out.table, "n", "outer_mass");
    let inner = grouped(&out.table, "n", "inner_mass");
    let last = outer.len() - 1;
    let passed = monotone(&outer, true, 1e-6) && outer[last].1 >= 0.9 && monotone(&inner, false, 1e-6) && inner[last].1 <= 0.1;
    let fmt = |g: &[(f64, f64, f64)]| g.iter().map(|x| format!("{:.4}", x.1)).collect::<Vec<_>>().join(" ");
    Outcome { passed, detail: format!("outer {} | inner {}", fmt(&outer), fmt(&inner)), csv: out.table.to_csv() }
}

fn c7_worst_case(_: &mut Ctx) -> Outcome {
    let (alpha, beta) = (1.0f64, 0.5f64);
    let mut t = Table::new(&["n", "epsilon_n", "zeta_n", "tail", "phi_a", "ratio"]);
    let mut ratios = Vec::new();
    for e in 3..=6 {
        let n = 10f64.powi(e);
        let eps = n.powf(-alpha.min(beta) / (2.0 * alpha + 1.0));
        let zeta = eps / n.ln().powi(2);
        let mut k = 64usize;
        while worst_case_tail(beta, k) >= zeta * zeta / 16.0 {
            k *= 2;
        }
        let f: Vec<f64> = (1..=k).map(|i| worst_case_coeff(beta, i)).collect();
        let tail = worst_case_tail(beta, k);
        let s = phi_a_waterfill_with_tail(&weights(alpha, k), &f, tail, zeta).unwrap();
        let ratio = s.value / (n * eps * eps);
        ratios.push(ratio);
        t.push(p0(k, 0), vec![n.into(), eps.into(), zeta.into(), tail.into(), s.value.into(), ratio.into()]);
    }
    Outcome {
        passed: ratios.windows(2).all(|w| w[1] > w[0]),
        detail: format!("ratios {}", ratios.iter().map(|r| format!("{r:.1}")).collect::<Vec<_>>().join(" ")),
        csv: t.to_csv(),
    }
}

fn quadrature_bayes(prior_var: f64, x: f64, n: f64) -> (f64, f64) {
    let spread = 12.0 * prior_var.sqrt().max(n.sqrt().recip());
    let (lo, hi) = (x.min(0.0) - spread, x.max(0.0) + spread);
    let m = 400_000;
    let h = (hi - lo) / m as f64;
    let log_dens = |t: f64| -0.5 * t * t / prior_var - 0.5 * n * (x - t).powi(2);
    let peak = (0..=m).map(|i| log_dens(lo + i as f64 * h)).fold(f64::NEG_INFINITY, f64::max);
    let (mut z, mut s1, mut s2) = (0.0, 0.0, 0.0);
    for i in 0..=m {
        let t = lo + i as f64 * h;
        let w = if i == 0 || i == m { 0.5 } else { 1.0 } * (log_dens(t) - peak).exp();
        z += w;
        s1 += w * t;
        s2 += w * t * t;
    }
    let mean = s1 / z;
    (mean, s2 / z - mean * mean)
}

fn c8_conjugacy(_: &mut Ctx) -> Outcome {
    let mut rng = stream(SEED, 8);
    let mut t = Table::new(&["alpha", "n", "x", "mean", "mean_oracle", "variance", "variance_oracle"]);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let alpha = [0.5, 1.0, 2.0][i % 3];
        let k = rng.random_range(1..=50usize);
        let n = 10f64.powf(rng.random_range(1.0..5.0));
        let prior = SeriesPrior::new(alpha, k).unwrap();
        let f0 = FourierFunction::from_fn(k, |j| (j as f64).powf(-1.5)).unwrap();
        let obs = observe(&f0, n, k, &mut rng).unwrap();
        let post = posterior(&prior, &obs).unwrap();
        let x = obs.x[k - 1];
        let (m, v) = quadrature_bayes(prior.sigma(k).powi(2), x, n);
        let (pm, pv) = (post.means[k - 1], post.variances[k - 1]);
        worst = worst.max((pm - m).abs() / m.abs().max(pv.sqrt())).max((pv - v).abs() / v);
        t.push(Prov { replicate: i, ..p0(k, 0) }, vec![alpha.into(), n.into(), x.into(), pm.into(), m.into(), pv.into(), v.into()]);
    }
    Outcome { passed: worst < 1e-6, detail: format!("max relative discrepancy {worst:.2e}"), csv: t.to_csv() }
}

fn c9_fractional(_: &mut Ctx) -> Outcome {
    let out = run("frac-check", &[]);
    let s = &out.summary;
    let ok = s["identities_pass"].as_bool().unwrap() && s["bound_pass"].as_bool().unwrap();
    let worst = out
        .table
        .rows()
        .iter()
        .zip(out.table.column("ratio"))
        .filter(|(r, _)| matches!(&r[4], contraction_lab::Cell::Text(c) if c == "monomial" || c == "composition"))
        .map(|(_, e)| e)
        .fold(0.0f64, f64::max);
    Outcome {
        passed: ok,
        detail: format!(
            "max identity rel error {worst:.2e}; bound cases {}; lemma7 max ratio {:.3}, lemma6 max ratio {:.3}",
            if s["bound_pass"].as_bool().unwrap() { "reproduced" } else { "wrong" },
            s["lemma7_max_ratio"].as_f64().unwrap(),
            s["lemma6_max_ratio"].as_f64().unwrap()
        ),
        csv: out.table.to_csv(),
    }
}

fn c10_lemma5(_: &mut Ctx) -> Outcome {
    let out = run("lemma5-audit", &[("pairs", "1000")]);
    let s = &out.summary;
    let v = s["violations"].as_u64().unwrap();
    let max = s["kv_ratio_max"].as_f64().unwrap_or(f64::NAN);
    Outcome {
        passed: v == 0 && max.is_finite(),
        detail: format!(
            "violations {v}; K∨V2 ratio min {:.4} median {:.4} max {:.4}",
            s["kv_ratio_min"].as_f64().unwrap_or(f64::NAN),
            s["kv_ratio_median"].as_f64().unwrap_or(f64::NAN),
            max
        ),
        csv: out.table.to_csv(),
    }
}

fn c11_shift(_: &mut Ctx) -> Outcome {
    let out = run("shift-bound", &[("alpha", "1"), ("dim", "64"), ("rhos", "-2,-1,1,2"), ("epsilon", "0.5"), ("samples", "200000")]);
    let lhs = out.table.column("phi_shifted");
    let base = out.table.column("phi_base");
    let term = out.table.column("shift_term");
    let detail = lhs
        .iter()
        .zip(&base)
        .zip(&term)
        .zip(out.table.column("rho"))
        .map(|(((l, b), s), r)| format!("rho={r}: {l:.3} >= {:.3}", b + s))
        .collect::<Vec<_>>()
        .join("; ");
    Outcome { passed: out.summary["all_hold"].as_bool().unwrap(), detail, csv: out.table.to_csv() }
}

fn c12_density(_: &mut Ctx) -> Outcome {
    let mut t = Table::new(&["alpha", "coefficient", "variance", "se"]);
    let mut invariant = true;
    for (i, alpha) in [0.5, 1.0].into_iter().enumerate() {
        let g = covariance_rl_type(&RLTypeParams::new(alpha, 21).unwrap()).unwrap();
        let lik = DensityLikelihood::new(&[], 21).unwrap();
        let cfg = PcnConfig { steps: 125_000, thin: 1, ..PcnConfig::default() };
        let chain = pcn_posterior(&g, &lik, &cfg, &mut stream(SEED, 120 + i as u64)).unwrap();
        for k in 0..g.rank() {
            let xs: Vec<f64> = chain.states.iter().map(|s| s[k]).collect();
            let (var, se) = (Moments::from_slice(&xs).variance(), variance_std_error(&xs));
            invariant &= (var - 1.0).abs() <= 3.0 * se;
            t.push(p0(g.rank(), cfg.steps as u64), vec![alpha.into(), k.into(), var.into(), se.into()]);
        }
    }
    let dens = run("density", &[]);
    let hell = grouped(&dens.table, "n", "hellinger_mass");
    let outer_ok = monotone(&hell, true, 0.0);
    let r3 = run("remark3", &[]);
    let n_max = r3.table.column("n").into_iter().fold(0.0, f64::max);
    let best = r3
        .table
        .column("n")
        .into_iter()
        .zip(r3.table.column("m"))
        .zip(r3.table.column("mass_mean"))
        .filter(|((n, m), mass)| *n == n_max && *m > 0.0 && *mass >= 0.9)
        .map(|((_, m), _)| m)
        .fold(None, |a: Option<f64>, m| Some(a.map_or(m, |x| x.max(m))));
    let mut csv = t.to_csv();
    csv.push_str(&dens.table.to_csv());
    csv.push_str(&r3.table.to_csv());
    Outcome {
        passed: invariant && outer_ok && best.is_some(),
        detail: format!(
            "prior invariance {}; Hellinger outer mass {}; largest m with mass >= 0.9 at n = {n_max}: {}",
            if invariant { "ok" } else { "violated" },
            hell.iter().map(|h| format!("{:.3}±{:.3}", h.1, h.2)).collect::<Vec<_>>().join(" "),
            best.map_or("none".into(), |m| m.to_string())
        ),
        csv,
    }
}

type Criterion = fn(&mut Ctx) -> Outcome;

fn main() -> ExitCode {
    // runtime limits in seconds; 0 means none
    let criteria: [(usize, &str, Criterion, u64); 12] = [
        (1, "water-filling exactness", c1_waterfill, 10),
        (2, "box-QP exactness", c2_box, 30),
        (3, "small-ball exponent", c3_small_ball, 120),
        (4, "decentered small-ball sandwich", c4_sandwich, 120),
        (5, "profile monotonicity and convexity", c5_profiles, 0),
        (6, "white-noise ring masses", c6_ring, 300),
        (7, "worst-case lower-bound driver", c7_worst_case, 60),
        (8, "conjugacy oracle", c8_conjugacy, 10),
        (9, "fractional-calculus identities", c9_fractional, 30),
        (10, "exponential-link density audit", c10_lemma5, 60),
        (11, "constant-shift bound", c11_shift, 120),
        (12, "density pipeline", c12_density, 900),
    ];
    let mut ctx = Ctx::default();
    let mut csvs = Vec::new();
    let mut failed = Vec::new();
    for (id, name, f, limit) in criteria {
        let start = Instant::now();
        let o = f(&mut ctx);
        let elapsed = start.elapsed();
        let in_time = limit == 0 || elapsed < Duration::from_secs(limit);
        let passed = o.passed && in_time;
        println!(
            "{} criterion {id:>2} ({name}): {} [{:.1}s{}]",
            if passed { "PASS" } else { "FAIL" },
            o.detail,
            elapsed.as_secs_f64(),
            match (limit, in_time) {
                (0, _) => String::new(),
                (l, true) => format!(", limit {l}s"),
                (l, false) => format!(", limit {l}s exceeded"),
            }
        );
        if !passed {
            failed.push(id);
        }
        csvs.push((id, o.csv));
    }
    let start = Instant::now();
    let mut rerun = Ctx::default();
    let differing: Vec<usize> = criteria
        .iter()
        .zip(&csvs)
        .filter(|((_, _, f, _), (_, csv))| f(&mut rerun).csv != *csv)
        .map(|(_, (id, _))| *id)
        .collect();
    let det_ok = differing.is_empty();
    println!(
        "{} criterion 13 (determinism): {} of 12 criteria reran to identical CSV bytes{} [{:.1}s]",
        if det_ok { "PASS" } else { "FAIL" },
        12 - differing.len(),
        if det_ok { String::new() } else { format!(", differing: {differing:?}") },
        start.elapsed().as_secs_f64()
    );
    if !det_ok {
        failed.push(13);
    }
    let unexpected: Vec<usize> = failed.iter().copied().filter(|id| !KNOWN_FAILURES.contains(id)).collect();
    println!("acceptance: {} of 13 passed; known failures {:?}; unexpected failures {:?}", 13 - failed.len(), KNOWN_FAILURES, unexpected);
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
