//! Acceptance checks, one verdict line per criterion.
//!
//! `cargo test -p sspe-cli --test acceptance` runs the quick criteria and
//! reports the long-running ones as skipped; add `-- --slow` to run all of
//! them, or list criterion numbers (`-- 3 9`) to run a selection.

use std::collections::HashMap;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use sspe::bayes::{pmmh, tune_pmmh_n, LikelihoodBackend, PmmhOptions, PriorSpec};
use sspe::ml::{offline_em, smoothed_additive, Backend, EmOptions, ParticleConfig};
use sspe::prelude::{
    exact_score, kalman_loglik, kalman_smoother, lg_densities, run_filter, simulate_lgssm, FilterOptions, FreeMask,
    InitialLaw, Param, ProposalKind, QuadraticFunctional, Theta,
};
use sspe::rng::{from_seed, replicate_seed, streams, substream};
use sspe::smooth::{ffbsm_additive, ffbsm_weights, forward_smooth};
use sspe::stats::{batch_means_se, mean, ols_slope, std_dev, std_error};
use sspe_cli::oracle::{localized_grid, Target};
use sspe_cli::{run_experiment, ExperimentConfig, ExperimentId, Overrides};

type Check = Result<String, String>;

struct Criterion {
    id: usize,
    name: &'static str,
    slow: bool,
    run: fn() -> Check,
}

const CRITERIA: &[Criterion] = &[
    Criterion { id: 1, name: "Kalman oracle against dense Gaussian algebra", slow: false, run: oracle },
    Criterion { id: 2, name: "unbiased likelihood estimate", slow: false, run: unbiased },
    Criterion { id: 3, name: "smoothing variance and bias trends", slow: true, run: smoothing_trends },
    Criterion { id: 4, name: "forward smoothing equals FFBSm", slow: false, run: forward_equals_ffbsm },
    Criterion { id: 5, name: "score identity and particle score", slow: false, run: score },
    Criterion { id: 6, name: "batch EM", slow: true, run: batch_em },
    Criterion { id: 7, name: "online EM", slow: true, run: online_em },
    Criterion { id: 8, name: "PMMH invariance", slow: true, run: pmmh_invariance },
    Criterion { id: 9, name: "MCMC-within-SMC degeneracy", slow: true, run: degeneracy },
    Criterion { id: 10, name: "particle Gibbs against MCMC-within-SMC", slow: true, run: pgibbs_vs_mws },
    Criterion { id: 11, name: "structural properties", slow: false, run: properties },
];

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let all = args.iter().any(|a| a == "--slow" || a == "--ignored" || a == "--include-ignored");
    let picked: Vec<usize> = args.iter().filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for c in CRITERIA {
        let selected = if picked.is_empty() { all || !c.slow } else { picked.contains(&c.id) };
        if !selected {
            let why = if c.slow { "long-running, pass --slow to include" } else { "not selected" };
            println!("criterion {:>2} SKIP {}: {why}", c.id, c.name);
            continue;
        }
        let clock = Instant::now();
        let verdict = (c.run)();
        let secs = clock.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("criterion {:>2} PASS {} ({secs:.1}s): {detail}", c.id, c.name),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL {} ({secs:.1}s): {detail}", c.id, c.name);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn cores() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

/// Runs an experiment through the harness and returns the aggregate rows.
fn experiment(
    id: ExperimentId,
    toml: &str,
    seed: u64,
    replicates: Option<usize>,
    dir: &Path,
) -> Result<Vec<HashMap<String, String>>, String> {
    let o = Overrides { seed: Some(seed), out: Some(dir.join(id.name())), replicates, parallelism: Some(cores()) };
    let (cfg, defaulted) = ExperimentConfig::from_toml(toml, id, &o).map_err(|e| e.to_string())?;
    let out = cfg.out.clone();
    let summary = run_experiment(cfg, defaulted).map_err(|e| e.to_string())?;
    if summary.exit_code() != 0 {
        return Err(format!("{} replicates failed", summary.metadata.failed_replicates.len()));
    }
    let mut rdr = csv::Reader::from_path(out.join("aggregate.csv")).map_err(|e| e.to_string())?;
    let headers = rdr.headers().map_err(|e| e.to_string())?.clone();
    rdr.records()
        .map(|r| {
            let r = r.map_err(|e| e.to_string())?;
            Ok(headers.iter().zip(r.iter()).map(|(h, v)| (h.to_string(), v.to_string())).collect())
        })
        .collect()
}

fn f(row: &HashMap<String, String>, key: &str) -> f64 {
    row[key].parse().unwrap_or(f64::NAN)
}

fn find<'a>(
    rows: &'a [HashMap<String, String>],
    pairs: &[(&str, &str)],
) -> Result<&'a HashMap<String, String>, String> {
    rows.iter()
        .find(|r| pairs.iter().all(|(k, v)| r[*k] == *v))
        .ok_or_else(|| format!("no aggregate row for {pairs:?}"))
}

// 1

fn state_cov(theta: &Theta, len: usize) -> DMatrix<f64> {
    let v = theta.tau2 / (1.0 - theta.rho * theta.rho);
    DMatrix::from_fn(len, len, |i, j| v * theta.rho.powi((i as i32 - j as i32).abs()))
}

fn oracle() -> Check {
    let mut rng = from_seed(101);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let theta = Theta::new(rng.random_range(-0.95..0.95), rng.random_range(0.05..3.0), rng.random_range(0.05..3.0))
            .unwrap();
        let y: Vec<f64> = (0..6).map(|_| rng.random_range(-3.0..3.0)).collect();
        let cov = state_cov(&theta, 6) + DMatrix::identity(6, 6) * theta.sigma2;
        let chol = cov.cholesky().unwrap();
        let yv = DVector::from_column_slice(&y);
        let logdet: f64 = 2.0 * chol.l().diagonal().iter().map(|d| d.ln()).sum::<f64>();
        let dense = -0.5 * (6.0 * (2.0 * std::f64::consts::PI).ln() + logdet + yv.dot(&chol.solve(&yv)));
        let k = kalman_loglik(&theta, InitialLaw::Stationary, &y).map_err(|e| e.to_string())?;
        worst = worst.max((k - dense).abs());

        let y3 = &y[..4];
        let p = state_cov(&theta, 4);
        let s = &p + DMatrix::identity(4, 4) * theta.sigma2;
        let gain = &p * s.try_inverse().unwrap();
        let m = &gain * DVector::from_column_slice(y3);
        let c = &p - &gain * &p;
        let sm = kalman_smoother(&theta, InitialLaw::Stationary, y3).map_err(|e| e.to_string())?;
        for n in 0..4 {
            worst = worst.max((sm.smooth_mean[n] - m[n]).abs()).max((sm.smooth_var[n] - c[(n, n)]).abs());
        }
        for n in 0..3 {
            worst = worst.max((sm.lag1_cov[n] - c[(n, n + 1)]).abs());
        }
    }
    ensure(worst < 1e-10, format!("largest discrepancy {worst:.2e} over 20 parameter draws (tolerance 1e-10)"))
}

// 2

fn unbiased() -> Check {
    let theta = Theta::new(0.8, 0.1, 1.0).unwrap();
    let init = InitialLaw::Stationary;
    let y = simulate_lgssm(&theta, init, 20, 2).map_err(|e| e.to_string())?.observations;
    let exact = kalman_loglik(&theta, init, &y).map_err(|e| e.to_string())?;
    let model = lg_densities(theta, init).map_err(|e| e.to_string())?;
    let ratios: Vec<f64> = (0..2000u64)
        .map(|r| {
            let mut rng = substream(replicate_seed(2, r), streams::FILTER);
            run_filter(&model, &y, 100, &FilterOptions::default(), &mut rng).map(|o| (o.loglik() - exact).exp())
        })
        .collect::<sspe::Result<_>>()
        .map_err(|e| e.to_string())?;
    let (m, se) = (mean(&ratios), std_error(&ratios));
    ensure(
        (m - 1.0).abs() <= 3.0 * se,
        format!("mean ratio {m:.4}, SE {se:.4}, |z| = {:.2} (limit 3)", (m - 1.0).abs() / se),
    )
}

// 3

fn smoothing_trends() -> Check {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let toml = "
[model]
rho = 0.8
tau2 = 0.1
sigma2 = 1.0
[algorithm]
n = [50, 100]
t = [5000]
methods = [\"pathspace\", \"forward\"]
match_cost = true
record_every = 250
";
    let rows = experiment(ExperimentId::SmoothingBiasVar, toml, 3, Some(100), tmp.path())?;
    let mut notes = Vec::new();
    let mut ok = true;
    for method in ["pathspace", "forward"] {
        for n in ["50", "100"] {
            let arm: Vec<&HashMap<String, String>> =
                rows.iter().filter(|r| r["method"] == method && r["N"] == n).collect();
            let at = |t: &str| arm.iter().find(|r| r["n"] == t).map(|r| f(r, "var_scaled")).unwrap_or(f64::NAN);
            let label = format!("{method} N={}", arm[0]["particles"]);
            if method == "pathspace" {
                let r = at("5000") / at("1000");
                ok &= r >= 2.0;
                notes.push(format!("{label} var ratio 5000/1000 = {r:.2} (>= 2)"));
            } else {
                let r = at("5000") / f(arm[0], "var_scaled");
                ok &= r <= 2.0;
                notes.push(format!("{label} var ratio end/start = {r:.2} (<= 2)"));
            }
            // Growth of the bias in the direction it drifts.
            let sign = f(arm[arm.len() - 1], "bias").signum();
            let x: Vec<f64> = arm.iter().map(|r| f(r, "n")).collect();
            let b: Vec<f64> = arm.iter().map(|r| sign * f(r, "bias")).collect();
            let (slope, se) = ols_slope(&x, &b);
            ok &= slope - 1.96 * se > 0.0;
            notes.push(format!("{label} |bias| slope {slope:.2e} +- {:.2e}", 1.96 * se));
        }
    }
    ensure(ok, notes.join("; "))
}

// 4

fn forward_equals_ffbsm() -> Check {
    let mut rng = from_seed(4);
    let mut worst: f64 = 0.0;
    for inst in 0..20u64 {
        let theta =
            Theta::new(rng.random_range(-0.95..0.95), rng.random_range(0.05..2.0), rng.random_range(0.1..2.0)).unwrap();
        let t = rng.random_range(1..=100);
        let n = rng.random_range(1..=100);
        let init = InitialLaw::Stationary;
        let y = simulate_lgssm(&theta, init, t, inst).map_err(|e| e.to_string())?.observations;
        let model = lg_densities(theta, init).map_err(|e| e.to_string())?;
        let out = run_filter(&model, &y, n, &FilterOptions::default(), &mut substream(inst, streams::FILTER))
            .map_err(|e| e.to_string())?;
        for s in [
            QuadraticFunctional::lag_product(),
            QuadraticFunctional::em_statistic(),
            QuadraticFunctional::score(&theta, init),
        ] {
            let a = forward_smooth(&out, &model, &s).map_err(|e| e.to_string())?.pop().unwrap();
            let b = ffbsm_additive(&out, &model, &s).map_err(|e| e.to_string())?;
            for (u, v) in a.iter().zip(&b) {
                worst = worst.max((u - v).abs() / v.abs().max(1e-300));
            }
        }
    }
    ensure(worst < 1e-8, format!("largest relative difference {worst:.2e} over 20 instances (tolerance 1e-8)"))
}

// 5

fn score() -> Check {
    let init = InitialLaw::Stationary;
    let mut rng = from_seed(5);
    let mut worst: f64 = 0.0;
    for inst in 0..20u64 {
        let theta =
            Theta::new(rng.random_range(-0.9..0.9), rng.random_range(0.2..2.0), rng.random_range(0.2..2.0)).unwrap();
        let y = simulate_lgssm(&theta, init, 30, inst).map_err(|e| e.to_string())?.observations;
        let g = exact_score(&theta, init, &y).map_err(|e| e.to_string())?;
        let h = 1e-5;
        for p in Param::ALL {
            let (mut up, mut dn) = (theta, theta);
            up.set(p, theta.get(p) + h);
            dn.set(p, theta.get(p) - h);
            let fd = (kalman_loglik(&up, init, &y).map_err(|e| e.to_string())?
                - kalman_loglik(&dn, init, &y).map_err(|e| e.to_string())?)
                / (2.0 * h);
            worst = worst.max((g[p.index()] - fd).abs() / fd.abs().max(1.0));
        }
    }
    let mut notes = vec![format!("finite differences: worst relative error {worst:.2e} (< 1e-4)")];
    let mut ok = worst < 1e-4;

    let truth = Theta::new(0.8, 0.1, 1.0).unwrap();
    let y = simulate_lgssm(&truth, init, 200, 55).map_err(|e| e.to_string())?.observations;
    let exact = exact_score(&truth, init, &y).map_err(|e| e.to_string())?;
    let s = QuadraticFunctional::score(&truth, init);
    let cfg = ParticleConfig::new(500, ProposalKind::Bootstrap);
    let reps: Vec<Vec<f64>> = (0..50u64)
        .map(|r| {
            smoothed_additive(
                Backend::Ffbsm,
                &truth,
                init,
                &y,
                &s,
                &cfg,
                &mut substream(replicate_seed(5, r), streams::SMOOTHER),
            )
        })
        .collect::<sspe::Result<_>>()
        .map_err(|e| e.to_string())?;
    for p in Param::ALL {
        let col: Vec<f64> = reps.iter().map(|r| r[p.index()]).collect();
        let (m, sd) = (mean(&col), std_dev(&col));
        let z = (m - exact[p.index()]).abs() / sd;
        ok &= z <= 3.0;
        notes.push(format!("particle {} mean off by {z:.2} replicate SD", p.name()));
    }
    ensure(ok, notes.join("; "))
}

// 6

fn batch_em() -> Check {
    let mut ok = true;
    let mut notes = Vec::new();
    let init = InitialLaw::Stationary;
    let mut rng = from_seed(6);
    let mut drops = 0;
    for inst in 0..20u64 {
        let truth =
            Theta::new(rng.random_range(-0.9..0.9), rng.random_range(0.1..2.0), rng.random_range(0.05..2.0)).unwrap();
        let y = simulate_lgssm(&truth, init, 1000, inst).map_err(|e| e.to_string())?.observations;
        let start = Theta::new(0.1, 0.01, truth.sigma2).unwrap().with_free(FreeMask::new(true, true, false));
        let tr = offline_em(&y, &start, &EmOptions { iters: 25, backend: Backend::Exact, ..Default::default() }, 0)
            .map_err(|e| e.to_string())?;
        drops += tr.exact_loglik.windows(2).filter(|w| w[1] < w[0] - 1e-9 * w[0].abs()).count();
    }
    ok &= drops == 0;
    notes.push(format!("exact EM: {drops} decreases over 20 instances x 25 iterations"));

    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let toml = "
[algorithm]
n = [150]
t = [1000]
methods = [\"forward\"]
iters = 25
";
    let rows = experiment(ExperimentId::OfflineEm, toml, 6, Some(50), tmp.path())?;
    for param in ["rho", "tau"] {
        let r = find(&rows, &[("param", param), ("T", "1000")])?;
        let cells = (f(r, "median") - f(r, "grid_ml")).abs() / f(r, "cell");
        ok &= cells <= 2.0;
        notes.push(format!(
            "median {param} {:.4} vs grid ML {:.4}: {cells:.2} cells (<= 2)",
            f(r, "median"),
            f(r, "grid_ml")
        ));
    }
    ensure(ok, notes.join("; "))
}

// 7

fn online_em() -> Check {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let toml = "
[algorithm]
n = [150]
t = [20000]
methods = [\"forward\"]
step_scale = 1.0
step_exponent = 0.8
n_freeze = 50
";
    let rows = experiment(ExperimentId::OnlineEm, toml, 7, Some(50), tmp.path())?;
    let r = find(&rows, &[("param", "rho"), ("n", "20000")])?;
    let (q25, q75, ml) = (f(r, "q25"), f(r, "q75"), f(r, "grid_ml"));
    ensure(q25 <= ml && ml <= q75, format!("rho IQR [{q25:.4}, {q75:.4}], grid ML {ml:.4}"))
}

// 8

fn pmmh_invariance() -> Check {
    let init = InitialLaw::Stationary;
    let truth = Theta::new(0.8, 0.1, 1.0).unwrap().with_free(FreeMask::new(true, false, true));
    let y = simulate_lgssm(&truth, init, 200, 8).map_err(|e| e.to_string())?.observations;
    let prior = PriorSpec::default();
    let grid = localized_grid(&prior, &y, &truth, init, 41, 3, Target::Posterior).map_err(|e| e.to_string())?;
    let pilot = LikelihoodBackend::Particle(ParticleConfig::new(1, ProposalKind::Bootstrap));
    let tuned =
        tune_pmmh_n(&y, &truth, init, pilot, &[50, 100, 200, 400, 800, 1600], 20, 1.3, 8).map_err(|e| e.to_string())?;
    let iters = 20_000;
    let burn = 2_000;
    let particle = PmmhOptions {
        iters,
        backend: LikelihoodBackend::Particle(ParticleConfig::new(tuned.chosen, ProposalKind::Bootstrap)),
        ..Default::default()
    };
    let exact = PmmhOptions { iters, ..Default::default() };
    let pc = pmmh(&y, &prior, &truth, &particle, 81).map_err(|e| e.to_string())?;
    let ec = pmmh(&y, &prior, &truth, &exact, 82).map_err(|e| e.to_string())?;
    let mut ok = true;
    let mut notes = vec![format!(
        "N = {} (sd table {:?})",
        tuned.chosen,
        tuned.table.iter().map(|(n, s)| format!("{n}:{s:.2}")).collect::<Vec<_>>()
    )];
    for p in [Param::Rho, Param::Sigma2] {
        let (a, b) = (&pc.trace(p)[burn..], &ec.trace(p)[burn..]);
        let (sa, sb) = (batch_means_se(a, 50), batch_means_se(b, 50));
        let g = grid.post.mean(p);
        let za = (mean(a) - g).abs() / sa;
        let zm = (mean(a) - mean(b)).abs() / (sa * sa + sb * sb).sqrt();
        ok &= za <= 3.0 && zm <= 3.0;
        notes.push(format!(
            "{}: particle {:.4}, exact {:.4}, grid {g:.4}; particle vs grid {za:.2} SE, particle vs exact {zm:.2} SE",
            p.name(),
            mean(a),
            mean(b)
        ));
    }
    ensure(ok, notes.join("; "))
}

// 9

fn degeneracy() -> Check {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let toml = "
[algorithm]
t = [20000]
mws_n = 5000
record_every = 1000
";
    let rows = experiment(ExperimentId::Degeneracy, toml, 9, Some(20), tmp.path())?;
    let (a, b) = (find(&rows, &[("n", "5000")])?, find(&rows, &[("n", "20000")])?);
    let (ra, rb) = (f(a, "rel_var_tau2"), f(b, "rel_var_tau2"));
    let ratio = f(b, "var_loglik") / f(a, "var_loglik");
    let bound = 4.0 * (20000.0 / 5000.0) / 2.0;
    ensure(
        rb > ra && ratio > bound,
        format!("relative variance of tau2 estimate {ra:.3} at 5000 -> {rb:.3} at 20000; var log-likelihood ratio {ratio:.2} (> {bound})"),
    )
}

// 10

fn pgibbs_vs_mws() -> Check {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let toml = "
[algorithm]
t = [1000]
pg_n = 50
pg_iters = 3000
mws_n = 75000
";
    let rows = experiment(ExperimentId::PgibbsCompare, toml, 10, Some(20), tmp.path())?;
    let pg = f(find(&rows, &[("method", "pgibbs"), ("param", "rho")])?, "sd_estimate");
    let mws = f(find(&rows, &[("method", "mcmc_within_smc"), ("param", "rho")])?, "sd_estimate");
    ensure(pg <= mws, format!("SD of rho posterior-mean estimate: particle Gibbs {pg:.4}, MCMC-within-SMC {mws:.4}"))
}

// 11

fn properties() -> Check {
    let mut rng = from_seed(11);
    let mut worst_sum: f64 = 0.0;
    let mut worst_row: f64 = 0.0;
    let mut ess_ok = true;
    for inst in 0..20u64 {
        let theta =
            Theta::new(rng.random_range(-0.95..0.95), rng.random_range(0.05..2.0), rng.random_range(0.1..2.0)).unwrap();
        let n = rng.random_range(1..=200);
        let model = lg_densities(theta, InitialLaw::Stationary).map_err(|e| e.to_string())?;
        let y = simulate_lgssm(&theta, InitialLaw::Stationary, 50, inst).map_err(|e| e.to_string())?.observations;
        let opts = FilterOptions::default().with_ess_trigger();
        let out = run_filter(&model, &y, n, &opts, &mut substream(inst, streams::FILTER)).map_err(|e| e.to_string())?;
        for sys in &out.systems {
            worst_sum = worst_sum.max((sys.norm_weights.iter().sum::<f64>() - 1.0).abs());
            let e = sys.ess();
            ess_ok &= (1.0 - 1e-9..=n as f64 + 1e-9).contains(&e);
        }
        for row in ffbsm_weights(&out, &model).map_err(|e| e.to_string())? {
            worst_row = worst_row.max((row.iter().sum::<f64>() - 1.0).abs());
        }
    }
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let toml = "
[algorithm]
n = [20]
t = [300]
record_every = 100
";
    let run = |p: usize, dir: &Path| -> Result<Vec<u8>, String> {
        let o = Overrides { seed: Some(11), out: Some(dir.to_path_buf()), replicates: Some(8), parallelism: Some(p) };
        let (cfg, d) =
            ExperimentConfig::from_toml(toml, ExperimentId::SmoothingBiasVar, &o).map_err(|e| e.to_string())?;
        run_experiment(cfg, d).map_err(|e| e.to_string())?;
        std::fs::read(dir.join("aggregate.csv")).map_err(|e| e.to_string())
    };
    let same = run(1, &tmp.path().join("p1"))? == run(8, &tmp.path().join("p8"))?;
    ensure(
        worst_sum < 1e-12 && worst_row < 1e-12 && ess_ok && same,
        format!(
            "weight sums off by {worst_sum:.1e}, backward rows off by {worst_row:.1e}, ESS in [1, N]: {ess_ok}, parallel aggregate identical: {same}"
        ),
    )
}
